//! Numeric tables written as CSV (with one leading `#` metadata line) or JSON.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Floats use the shortest representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: &str) -> Result<()> {
        for line in comment.lines() {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, comment: &str) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, comment)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    /// Parses CSV written by [`Table::write_csv`], returning the metadata
    /// lines (without `# `) and the table.
    pub fn read_csv<R: Read>(mut input: R) -> Result<(String, Table)> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let comment: Vec<&str> = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim_start())
            .collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        let mut table = Table::new(columns);
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| Error::invalid(format!("non-numeric cell '{c}'")))
                })
                .collect::<Result<Vec<f64>>>()?;
            table.push(row)?;
        }
        Ok((comment.join("\n"), table))
    }

    pub fn to_json(&self, metadata: &str) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            metadata: &'a str,
            columns: &'a [String],
            rows: &'a [Vec<f64>],
        }
        Ok(serde_json::to_string_pretty(&Doc {
            metadata,
            columns: &self.columns,
            rows: &self.rows,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn writes_comment_and_header() {
        let mut t = Table::new(["t", "value"]);
        t.push(vec![1.0, 0.1]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let s = t.to_csv_string("rankone 0.1.0 volume --t 1").unwrap();
        assert_eq!(s, "# rankone 0.1.0 volume --t 1\nt,value\n1.0,0.1\n");
        let (meta, back) = Table::read_csv(s.as_bytes()).unwrap();
        assert_eq!(meta, "rankone 0.1.0 volume --t 1");
        assert_eq!(back, t);
        assert_eq!(back.column("value"), Some(vec![0.1]));
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(["a"]);
        t.push(vec![2.5]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json("m").unwrap()).unwrap();
        assert_eq!(v["columns"][0], "a");
        assert_eq!(v["rows"][0][0], 2.5);
        assert_eq!(v["metadata"], "m");
    }

    proptest! {
        #[test]
        fn csv_round_trips_exactly(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 0..20)) {
            let mut t = Table::new(["x", "y", "z"]);
            for r in rows {
                t.push(r).unwrap();
            }
            let s = t.to_csv_string("meta").unwrap();
            let (_, back) = Table::read_csv(s.as_bytes()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
