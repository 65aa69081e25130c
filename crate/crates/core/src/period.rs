//! Calendar periods at monthly or quarterly frequency.
//!
//! Canonical text forms are `YYYY-MM` for months and `YYYY-Qn` for quarters.
//! Parsing is tolerant of the variants seen in the raw source files
//! (`1994 Q1`, float-formatted years like `1994.0`, month names).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frequency {
    Monthly,
    Quarterly,
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frequency::Monthly => write!(f, "monthly"),
            Frequency::Quarterly => write!(f, "quarterly"),
        }
    }
}

/// A single calendar period: one month or one quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Period {
    /// `month` is 1-based (1..=12).
    Month { year: i32, month: u8 },
    /// `quarter` is 1-based (1..=4).
    Quarter { year: i32, quarter: u8 },
}

impl Period {
    pub fn month(year: i32, month: u8) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        Period::Month { year, month }
    }

    pub fn quarter(year: i32, quarter: u8) -> Self {
        assert!((1..=4).contains(&quarter), "quarter out of range: {quarter}");
        Period::Quarter { year, quarter }
    }

    pub fn frequency(&self) -> Frequency {
        match self {
            Period::Month { .. } => Frequency::Monthly,
            Period::Quarter { .. } => Frequency::Quarterly,
        }
    }

    /// The quarter containing this month; identity for quarters.
    pub fn containing_quarter(&self) -> Period {
        match *self {
            Period::Month { year, month } => Period::Quarter {
                year,
                quarter: (month - 1) / 3 + 1,
            },
            q @ Period::Quarter { .. } => q,
        }
    }

    /// Position of the month within its quarter (0, 1, 2). Quarters return 0.
    pub fn month_in_quarter(&self) -> u8 {
        match *self {
            Period::Month { month, .. } => (month - 1) % 3,
            Period::Quarter { .. } => 0,
        }
    }

    pub fn next(&self) -> Period {
        match *self {
            Period::Month { year, month } => {
                if month == 12 {
                    Period::Month {
                        year: year + 1,
                        month: 1,
                    }
                } else {
                    Period::Month {
                        year,
                        month: month + 1,
                    }
                }
            }
            Period::Quarter { year, quarter } => {
                if quarter == 4 {
                    Period::Quarter {
                        year: year + 1,
                        quarter: 1,
                    }
                } else {
                    Period::Quarter {
                        year,
                        quarter: quarter + 1,
                    }
                }
            }
        }
    }

    /// Parse the canonical or source-file forms of a period string.
    pub fn parse(text: &str) -> Result<Period, Error> {
        let t = text.trim();
        Period::from_str(t).map_err(|_| Error::UnparseableDate {
            row: 0,
            cell: text.to_string(),
        })
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Period::Month { year, month } => write!(f, "{year:04}-{month:02}"),
            Period::Quarter { year, quarter } => write!(f, "{year:04}-Q{quarter}"),
        }
    }
}

impl FromStr for Period {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        // Quarterly: "1994-Q1", "1994 Q1", "1994Q1", "Q1 1994"
        if let Some(idx) = t.to_ascii_uppercase().find('Q') {
            let upper = t.to_ascii_uppercase();
            let (head, tail) = upper.split_at(idx);
            let qpart = tail.trim_start_matches('Q');
            let (year_str, quarter_str) = if head.trim().is_empty() {
                // "Q1 1994"
                let mut it = qpart.split_whitespace();
                let q = it.next().unwrap_or("");
                let y = it.next().unwrap_or("");
                (y.to_string(), q.to_string())
            } else {
                (
                    head.trim().trim_end_matches(['-', '/', ' ']).to_string(),
                    qpart.trim().to_string(),
                )
            };
            let year = parse_year(&year_str).ok_or_else(|| format!("bad year in `{s}`"))?;
            let quarter: u8 = quarter_str
                .parse()
                .map_err(|_| format!("bad quarter in `{s}`"))?;
            if !(1..=4).contains(&quarter) {
                return Err(format!("quarter out of range in `{s}`"));
            }
            return Ok(Period::Quarter { year, quarter });
        }
        // Monthly: "1994-03", "1994-3", "1994/03"
        if let Some((y, m)) = t.split_once(['-', '/']) {
            let year = parse_year(y).ok_or_else(|| format!("bad year in `{s}`"))?;
            let month = parse_month(m).ok_or_else(|| format!("bad month in `{s}`"))?;
            return Ok(Period::Month { year, month });
        }
        Err(format!("unrecognized period `{s}`"))
    }
}

/// Year cells arrive as "1994", "1994.0" or with stray spaces.
pub fn parse_year(cell: &str) -> Option<i32> {
    let t = cell.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(y) = t.parse::<i32>() {
        return valid_year(y);
    }
    // Float-typed years from spreadsheet exports.
    if let Ok(f) = t.parse::<f64>() {
        if f.fract() == 0.0 {
            return valid_year(f as i32);
        }
    }
    None
}

fn valid_year(y: i32) -> Option<i32> {
    (1000..=9999).contains(&y).then_some(y)
}

/// Month cells arrive as numbers ("3", "03", "3.0") or names ("Mar", "MARCH").
pub fn parse_month(cell: &str) -> Option<u8> {
    let t = cell.trim();
    if t.is_empty() {
        return None;
    }
    if let Ok(m) = t.parse::<u8>() {
        return (1..=12).contains(&m).then_some(m);
    }
    if let Ok(f) = t.parse::<f64>() {
        if f.fract() == 0.0 && (1.0..=12.0).contains(&f) {
            return Some(f as u8);
        }
    }
    const NAMES: [&str; 12] = [
        "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC",
    ];
    let upper = t.to_ascii_uppercase();
    NAMES
        .iter()
        .position(|n| upper.starts_with(n))
        .map(|i| (i + 1) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for p in [Period::month(1994, 3), Period::quarter(2020, 4)] {
            let text = p.to_string();
            assert_eq!(Period::parse(&text).unwrap(), p);
        }
    }

    #[test]
    fn tolerant_quarter_forms() {
        for s in ["1994 Q1", "1994-Q1", "1994Q1", " 1994 Q1 ", "Q1 1994"] {
            assert_eq!(Period::parse(s).unwrap(), Period::quarter(1994, 1), "{s}");
        }
    }

    #[test]
    fn month_ordering_is_chronological() {
        let dec = Period::month(1993, 12);
        let jan = Period::month(1994, 1);
        assert!(dec < jan);
        assert_eq!(dec.next(), jan);
        assert_eq!(Period::quarter(1999, 4).next(), Period::quarter(2000, 1));
    }

    #[test]
    fn quarter_of_month() {
        assert_eq!(
            Period::month(1994, 6).containing_quarter(),
            Period::quarter(1994, 2)
        );
        assert_eq!(Period::month(1994, 1).month_in_quarter(), 0);
        assert_eq!(Period::month(1994, 6).month_in_quarter(), 2);
    }

    #[test]
    fn year_and_month_cells() {
        assert_eq!(parse_year("1994"), Some(1994));
        assert_eq!(parse_year("1994.0"), Some(1994));
        assert_eq!(parse_year(" 2020 "), Some(2020));
        assert_eq!(parse_year(""), None);
        assert_eq!(parse_year("n/a"), None);
        assert_eq!(parse_month("Jan"), Some(1));
        assert_eq!(parse_month("MARCH"), Some(3));
        assert_eq!(parse_month("12"), Some(12));
        assert_eq!(parse_month("3.0"), Some(3));
        assert_eq!(parse_month("13"), None);
    }

    #[test]
    fn bad_periods_rejected() {
        assert!(Period::parse("1994 Q5").is_err());
        assert!(Period::parse("hello").is_err());
        assert!(Period::parse("1994-13").is_err());
    }
}
