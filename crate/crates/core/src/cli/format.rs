//! CSV and JSON encodings of [`Record`].

use std::io::Write;

use crate::error::{Error, Result};
use crate::verify::Record;

pub const CSV_HEADER: &str = "n,p,q,b,b_value,method,regime,witness,elapsed_ms";

/// Divisors joined by `+`; an empty selection is `{}`.
pub fn encode_witness(w: &[u64]) -> String {
    if w.is_empty() {
        return "{}".into();
    }
    w.iter().map(u64::to_string).collect::<Vec<_>>().join("+")
}

pub fn decode_witness(s: &str) -> Result<Vec<u64>> {
    if s == "{}" {
        return Ok(Vec::new());
    }
    s.split('+').map(|d| d.parse().map_err(|_| Error::Parse(format!("bad witness divisor {d:?}")))).collect()
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

fn csv_fields(r: &Record) -> [String; 9] {
    [
        r.n.to_string(),
        opt(&r.p),
        opt(&r.q),
        opt(&r.b),
        r.b_value.to_string(),
        r.method.clone(),
        opt(&r.regime),
        r.witness.as_deref().map_or(String::new(), encode_witness),
        r.elapsed_ms.to_string(),
    ]
}

/// Writes the header and one row per record.
pub fn write_csv<W: Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        w.write_record(csv_fields(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_opt<T: std::str::FromStr>(s: &str, field: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Parse(format!("bad {field} {s:?}")))
}

fn parse_req<T: std::str::FromStr>(s: &str, field: &str) -> Result<T> {
    parse_opt(s, field)?.ok_or_else(|| Error::Parse(format!("missing {field}")))
}

/// Parses CSV produced by [`write_csv`], header included.
pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(Record {
            n: parse_req(f(0), "n")?,
            p: parse_opt(f(1), "p")?,
            q: parse_opt(f(2), "q")?,
            b: parse_opt(f(3), "b")?,
            b_value: parse_req(f(4), "b_value")?,
            method: f(5).to_string(),
            regime: (!f(6).is_empty()).then(|| f(6).to_string()),
            witness: if f(7).is_empty() { None } else { Some(decode_witness(f(7))?) },
            elapsed_ms: parse_req(f(8), "elapsed_ms")?,
        });
    }
    Ok(out)
}

/// One JSON object, keys in field order.
pub fn to_json_line(r: &Record) -> String {
    serde_json::to_string(r).expect("records serialize")
}

pub fn parse_json_line(line: &str) -> Result<Record> {
    Ok(serde_json::from_str(line)?)
}
