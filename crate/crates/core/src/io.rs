//! FASTA records and segment TSV files.

use std::fs;
use std::path::Path;

use crate::annotation::{Annotation, Segment};
use crate::error::{Error, Result};

pub const SEGMENT_HEADER: &str = "seq_id\tstart\tend\tcolor_id\tcolor_name";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    /// First whitespace-separated token of the header.
    pub id: String,
    pub seq: String,
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn parse_fasta(text: &str, source: &str) -> Result<Vec<FastaRecord>> {
    let mut out: Vec<FastaRecord> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            if id.is_empty() {
                return Err(Error::Parse { path: source.into(), line: i + 1, message: "empty record id".into() });
            }
            out.push(FastaRecord { id, seq: String::new() });
        } else {
            match out.last_mut() {
                Some(rec) => rec.seq.push_str(line),
                None => {
                    return Err(Error::Parse {
                        path: source.into(),
                        line: i + 1,
                        message: "sequence data before the first header".into(),
                    })
                }
            }
        }
    }
    Ok(out)
}

pub fn format_fasta(records: &[FastaRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.id);
        out.push('\n');
        for chunk in r.seq.as_bytes().chunks(80) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii sequence"));
            out.push('\n');
        }
    }
    out
}

/// Appends one record's segments as TSV rows (no header).
pub fn push_segments(out: &mut String, id: &str, annotation: &Annotation, color_names: &[String]) {
    for Segment { start, end, color } in annotation.segments() {
        let name = color_names.get(color).map(String::as_str).unwrap_or("");
        out.push_str(&format!("{id}\t{start}\t{end}\t{color}\t{name}\n"));
    }
}

pub fn format_segments(records: &[(String, Annotation)], color_names: &[String]) -> String {
    let mut out = format!("{SEGMENT_HEADER}\n");
    for (id, a) in records {
        push_segments(&mut out, id, a, color_names);
    }
    out
}

/// Reads a segment TSV back into per-record colorings, in file order.
/// Rows of one record must be contiguous and tile `1..=len`.
pub fn parse_segments(text: &str, source: &str) -> Result<Vec<(String, Annotation)>> {
    let err = |line: usize, message: String| Error::Parse { path: source.into(), line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == SEGMENT_HEADER => {}
        Some(_) => return Err(err(1, format!("expected header {SEGMENT_HEADER:?}"))),
        None => return Ok(Vec::new()),
    }
    let mut groups: Vec<(String, Vec<Segment>, usize)> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(err(i + 1, format!("expected 5 tab-separated fields, found {}", fields.len())));
        }
        let num = |s: &str, what: &str| s.trim().parse::<usize>().map_err(|_| err(i + 1, format!("bad {what} {s:?}")));
        let seg = Segment { start: num(fields[1], "start")?, end: num(fields[2], "end")?, color: num(fields[3], "color_id")? };
        match groups.last_mut() {
            Some((id, segs, _)) if id == fields[0] => segs.push(seg),
            _ => {
                if groups.iter().any(|(id, _, _)| id == fields[0]) {
                    return Err(err(i + 1, format!("rows of record {} are not contiguous", fields[0])));
                }
                groups.push((fields[0].to_string(), vec![seg], i + 1));
            }
        }
    }
    groups
        .into_iter()
        .map(|(id, segs, line)| {
            let a = Annotation::from_segments(&segs).map_err(|e| err(line, e.to_string()))?;
            Ok((id, a))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fasta_roundtrip_and_errors() {
        let recs = parse_fasta(">q1 some text\nxy\nyx\n\n>q2\nx\n", "in.fa").unwrap();
        assert_eq!(recs, vec![
            FastaRecord { id: "q1".into(), seq: "xyyx".into() },
            FastaRecord { id: "q2".into(), seq: "x".into() },
        ]);
        assert_eq!(parse_fasta(&format_fasta(&recs), "x").unwrap(), recs);
        assert!(parse_fasta("", "x").unwrap().is_empty());
        let e = parse_fasta("xy\n", "in.fa").unwrap_err();
        assert_eq!(e.to_string(), "in.fa:1: sequence data before the first header");
    }

    #[test]
    fn segment_tsv_roundtrip() {
        let names = vec!["A".to_string(), "B".to_string()];
        let recs = vec![
            ("r1".to_string(), Annotation::new(vec![0, 1])),
            ("r2".to_string(), Annotation::new(vec![1, 1, 1, 0])),
        ];
        let text = format_segments(&recs, &names);
        assert_eq!(text, "seq_id\tstart\tend\tcolor_id\tcolor_name\nr1\t1\t1\t0\tA\nr1\t2\t2\t1\tB\nr2\t1\t3\t1\tB\nr2\t4\t4\t0\tA\n");
        assert_eq!(parse_segments(&text, "t.tsv").unwrap(), recs);
        assert!(parse_segments("bad\n", "t.tsv").is_err());
        let split = format!("{SEGMENT_HEADER}\nr1\t1\t1\t0\tA\nr2\t1\t1\t0\tA\nr1\t2\t2\t0\tA\n");
        assert!(parse_segments(&split, "t.tsv").is_err());
    }
}
