use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use super::{Bar, PriceSeries};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["date", "open", "high", "low", "close", "volume"];

/// Loads a series; the symbol is the file stem.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let symbol = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(file, &symbol)
}

fn parse_price(field: &str, name: &str, line: u64) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("{name}: `{field}` is not a decimal number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{name}: `{field}` is not finite"),
        });
    }
    Ok(v)
}

/// Parses `date,open,high,low,close,volume` rows in any order; the result is
/// sorted by date. Duplicate dates and OHLC violations are rejected with the
/// offending line.
pub fn parse_csv<R: Read>(reader: R, symbol: &str) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let got: Vec<&str> = header.iter().collect();
    if got != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                got.join(",")
            ),
        });
    }

    let mut rows: Vec<(u64, Bar)> = Vec::new();
    let mut seen: HashMap<NaiveDate, u64> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    CSV_HEADER.len(),
                    record.len()
                ),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|_| Error::Parse {
            line,
            message: format!("date: `{}` is not YYYY-MM-DD", &record[0]),
        })?;
        let volume: u64 = record[5].parse().map_err(|_| Error::Parse {
            line,
            message: format!("volume: `{}` is not a non-negative integer", &record[5]),
        })?;
        let bar = Bar {
            date,
            open: parse_price(&record[1], "open", line)?,
            high: parse_price(&record[2], "high", line)?,
            low: parse_price(&record[3], "low", line)?,
            close: parse_price(&record[4], "close", line)?,
            volume,
        };
        if let Some(reason) = bar.violation() {
            return Err(Error::InvalidBar {
                line,
                date: date.to_string(),
                reason,
            });
        }
        if seen.insert(date, line).is_some() {
            return Err(Error::DuplicateDate {
                line,
                date: date.to_string(),
            });
        }
        rows.push((line, bar));
    }

    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }
    rows.sort_by_key(|(_, b)| b.date);
    PriceSeries::new(symbol, rows.into_iter().map(|(_, b)| b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "date,open,high,low,close,volume\n\
        2013-02-07,124.0,127.2,123.3,126.0,1000\n\
        2013-02-05,125.0,126.0,124.0,125.5,900\n\
        2013-02-06,125.5,127.0,124.5,124.8,1100\n";

    #[test]
    fn parses_and_sorts() {
        let s = parse_csv(GOOD.as_bytes(), "LNKD").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.symbol(), "LNKD");
        assert_eq!(
            s.bars()[0].date,
            NaiveDate::from_ymd_opt(2013, 2, 5).unwrap()
        );
        assert_eq!(s.closes(), vec![125.5, 124.8, 126.0]);
    }

    #[test]
    fn high_below_low_names_the_row() {
        let csv = "date,open,high,low,close,volume\n\
            2013-02-05,125.0,126.0,124.0,125.5,900\n\
            2013-02-06,125.0,123.0,124.0,125.5,900\n";
        match parse_csv(csv.as_bytes(), "X").unwrap_err() {
            Error::InvalidBar { line, date, .. } => {
                assert_eq!(line, 3);
                assert_eq!(date, "2013-02-06");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        assert!(matches!(
            parse_csv("date,open,high,low,close,volume\n".as_bytes(), "X"),
            Err(Error::EmptySeries)
        ));
        assert!(matches!(
            parse_csv("".as_bytes(), "X"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_bad_fields() {
        let dup = "date,open,high,low,close,volume\n\
            2013-02-05,125,126,124,125.5,900\n\
            2013-02-05,125,126,124,125.5,900\n";
        assert!(matches!(
            parse_csv(dup.as_bytes(), "X"),
            Err(Error::DuplicateDate { line: 3, .. })
        ));

        let cases = [
            "date,open,high,low,close\n2013-02-05,1,1,1,1\n",
            "date,open,high,low,close,volume\n05/02/2013,1,1,1,1,1\n",
            "date,open,high,low,close,volume\n2013-02-05,abc,1,1,1,1\n",
            "date,open,high,low,close,volume\n2013-02-05,1,1,1,1,-3\n",
            "date,open,high,low,close,volume\n2013-02-05,1,1,1,1\n",
            "date,open,high,low,close,volume\n2013-02-05,0,1,0,1,1\n",
            "date,open,high,low,close,volume\n2013-02-05,NaN,1,1,1,1\n",
        ];
        for c in cases {
            assert!(parse_csv(c.as_bytes(), "X").is_err(), "{c}");
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_csv("/nonexistent/x.csv"),
            Err(Error::Io { .. })
        ));
    }
}
