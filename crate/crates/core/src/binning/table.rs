//! CSV ingestion: the raw case table and the long-format TSH table.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{NaiveDate, NaiveDateTime};

use super::tsh::TshSeries;
use super::BinningError;

/// Case table as read: header plus one row per case, `None` for N/A cells.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

fn is_na(cell: &str, na_tokens: &[String]) -> bool {
    let t = cell.trim();
    na_tokens.iter().any(|n| n == t)
}

impl RawTable {
    pub fn from_csv<R: Read>(reader: R, na_tokens: &[String]) -> Result<Self, BinningError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            rows.push(
                rec.iter().map(|c| if is_na(c, na_tokens) { None } else { Some(c.trim().to_string()) }).collect(),
            );
        }
        Ok(RawTable { headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn to_csv<W: std::io::Write>(&self, writer: W) -> Result<(), BinningError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("NA")))?;
        }
        w.flush().map_err(|e| BinningError::Csv(e.to_string()))?;
        Ok(())
    }
}

/// TSH series per case id.
pub type TshTable = BTreeMap<String, TshSeries>;

/// Parses a timestamp as days: a plain number of days, an ISO date, or an
/// ISO date-time (fractional days since the Unix epoch).
pub fn parse_days(s: &str) -> Option<f64> {
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1)?.and_hms_opt(0, 0, 0)?;
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some((d.and_hms_opt(0, 0, 0)? - epoch).num_seconds() as f64 / 86_400.0);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some((dt - epoch).num_seconds() as f64 / 86_400.0);
        }
    }
    None
}

/// Reads `case_id,timestamp,tsh` records. Records whose TSH is N/A are
/// skipped; cases left with no records are absent from the result.
pub fn read_tsh_csv<R: Read>(reader: R, na_tokens: &[String]) -> Result<TshTable, BinningError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| BinningError::MissingColumn(name.to_string()))
    };
    let (ci, ti, vi) = (col("case_id")?, col("timestamp")?, col("tsh")?);
    let mut raw: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = r + 2;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let tsh = field(vi);
        if is_na(tsh, na_tokens) {
            continue;
        }
        let parse_err = |column: &str, message: String| BinningError::Parse { line, column: column.into(), message };
        let value: f64 = tsh.parse().map_err(|_| parse_err("tsh", format!("cannot parse {tsh:?} as a number")))?;
        let ts = field(ti);
        let t = parse_days(ts).ok_or_else(|| parse_err("timestamp", format!("cannot parse {ts:?} as a time")))?;
        raw.entry(field(ci).to_string()).or_default().push((t, value));
    }
    raw.into_iter()
        .map(|(id, recs)| {
            let s = TshSeries::from_raw(recs)
                .map_err(|e| BinningError::Series { case: id.clone(), source: Box::new(e) })?;
            Ok((id, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::config::default_na_tokens;

    #[test]
    fn reads_na_cells() {
        let t = RawTable::from_csv("id,a,b\n1, x ,NA\n2,,N/A\n".as_bytes(), &default_na_tokens()).unwrap();
        assert_eq!(t.headers, vec!["id", "a", "b"]);
        assert_eq!(t.rows[0], vec![Some("1".into()), Some("x".into()), None]);
        assert_eq!(t.rows[1], vec![Some("2".into()), None, None]);
    }

    #[test]
    fn ragged_rows_are_csv_errors() {
        assert!(matches!(RawTable::from_csv("a,b\n1\n".as_bytes(), &[]), Err(BinningError::Csv(_))));
    }

    #[test]
    fn day_parsing() {
        assert_eq!(parse_days("12.5"), Some(12.5));
        assert_eq!(parse_days("1970-01-03"), Some(2.0));
        assert_eq!(parse_days("1970-01-01T12:00:00"), Some(0.5));
        assert_eq!(parse_days("yesterday"), None);
    }

    #[test]
    fn tsh_table() {
        let csv = "case_id,timestamp,tsh\nc1,0,1.0\nc1,2,NA\nc1,1,2.0\nc2,5,\nc3,2020-01-01,3\n";
        let t = read_tsh_csv(csv.as_bytes(), &default_na_tokens()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t["c1"].points(), &[(0.0, 0.0), (1.0, 2f64.ln())]);
        assert!(!t.contains_key("c2"));
        let bad = "case_id,timestamp,tsh\nc1,0,abc\n";
        assert!(matches!(read_tsh_csv(bad.as_bytes(), &[]), Err(BinningError::Parse { line: 2, .. })));
        let dup = "case_id,timestamp,tsh\nc1,0,1\nc1,0,2\n";
        match read_tsh_csv(dup.as_bytes(), &[]) {
            Err(BinningError::Series { case, source }) => {
                assert_eq!(case, "c1");
                assert_eq!(*source, BinningError::ZeroInterval { time: 0.0 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
