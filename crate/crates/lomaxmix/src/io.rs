//! Plain-text file formats.
//!
//! - message log: `timestamp,sender,receiver` per line, integer seconds,
//!   optional header row, configurable delimiter;
//! - count file: `unit_id,count` or a bare `count` per line, counts `>= 1`;
//! - delay file: one nonnegative real (seconds) per line.
//!
//! Readers never drop a row silently: every non-blank row ends up either as
//! an item or as a [`RowError`] carrying its line number.

use std::fmt;
use std::io::{self, Read, Write};

use lomaxmix_core::MessageEvent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Items parsed from a file together with the rows that were rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub items: Vec<T>,
    pub errors: Vec<RowError>,
}

impl<T> Parsed<T> {
    /// Data rows seen, accepted or not.
    pub fn rows(&self) -> usize {
        self.items.len() + self.errors.len()
    }
}

fn reader<R: Read>(input: R, delimiter: u8, header: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

/// Walks the data rows, handing each one's fields to `parse`.
fn parse_rows<R, T, F>(input: R, delimiter: u8, header: bool, mut parse: F) -> io::Result<Parsed<T>>
where
    R: Read,
    F: FnMut(&[&str]) -> Result<T, String>,
{
    let mut rdr = reader(input, delimiter, header);
    let mut out = Parsed {
        items: Vec::new(),
        errors: Vec::new(),
    };
    let mut record = csv::ByteRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                let line = e.position().map_or(line, |p| p.line());
                out.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        let fields: Result<Vec<&str>, _> = record.iter().map(std::str::from_utf8).collect();
        let result = match fields {
            Ok(fields) => parse(&fields),
            Err(_) => Err("row is not valid UTF-8".to_string()),
        };
        match result {
            Ok(item) => out.items.push(item),
            Err(message) => out.errors.push(RowError { line, message }),
        }
    }
    Ok(out)
}

pub fn read_message_log<R: Read>(
    input: R,
    delimiter: u8,
    header: bool,
) -> io::Result<Parsed<MessageEvent>> {
    parse_rows(input, delimiter, header, |fields| {
        let [timestamp, sender, receiver] = fields else {
            return Err(format!("expected 3 fields, found {}", fields.len()));
        };
        let timestamp: i64 = timestamp
            .parse()
            .map_err(|_| format!("timestamp {timestamp:?} is not an integer"))?;
        if sender.is_empty() || receiver.is_empty() {
            return Err("empty sender or receiver".to_string());
        }
        Ok(MessageEvent::new(timestamp, *sender, *receiver))
    })
}

fn parse_count(text: &str) -> Result<u64, String> {
    match text.parse::<u64>() {
        Ok(0) => Err("count 0 is outside the support k >= 1".to_string()),
        Ok(k) => Ok(k),
        Err(_) if text.starts_with('-') && text[1..].parse::<u64>().is_ok() => {
            Err(format!("negative count {text}"))
        }
        Err(_) => Err(format!("count {text:?} is not a positive integer")),
    }
}

/// Reads a count file; unit identifiers are accepted and discarded.
pub fn read_counts<R: Read>(input: R, delimiter: u8) -> io::Result<Parsed<u64>> {
    parse_rows(input, delimiter, false, |fields| match fields {
        [count] | [_, count] => parse_count(count),
        _ => Err(format!("expected 1 or 2 fields, found {}", fields.len())),
    })
}

pub fn read_delays<R: Read>(input: R) -> io::Result<Parsed<f64>> {
    parse_rows(input, b',', false, |fields| {
        let [text] = fields else {
            return Err(format!("expected 1 field, found {}", fields.len()));
        };
        match text.parse::<f64>() {
            Ok(d) if d >= 0.0 && d.is_finite() => Ok(d),
            _ => Err(format!("delay {text:?} is not a finite number >= 0")),
        }
    })
}

/// Writes one bare count per line.
pub fn write_counts<W: Write>(mut out: W, counts: impl IntoIterator<Item = u64>) -> io::Result<()> {
    for k in counts {
        writeln!(out, "{k}")?;
    }
    out.flush()
}

pub fn write_delays<W: Write>(mut out: W, delays: &[f64]) -> io::Result<()> {
    for d in delays {
        writeln!(out, "{d:?}")?;
    }
    out.flush()
}

/// Tab-separated table with a header row; floats use the shortest
/// representation that reads back to the same value.
pub fn write_tsv<W: Write>(mut out: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join("\t"))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    out.flush()
}

/// Integers print without a fractional part, everything else as `{:?}`.
pub fn format_float(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}
