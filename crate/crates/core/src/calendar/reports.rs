//! Company report fixtures keyed by `(company, day)`.
//!
//! Files are named `A_012.txt` / `B_012.txt`. An optional first line of the
//! form `tone: +1` sets the report's sentiment; the rest is the report body.
//! Day 1 holds the opening narrative and is always a report day.

use std::collections::BTreeMap;
use std::path::Path;

use super::CalendarError;
use crate::types::{Day, StockId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub stock: StockId,
    pub day: Day,
    pub text: String,
    pub tone: i8,
}

#[derive(Clone, Debug, Default)]
pub struct ReportLibrary {
    reports: BTreeMap<(Day, StockId), Report>,
}

const BUILTIN: &[(&str, &str)] = &[
    ("A_001.txt", include_str!("../../fixtures/reports/A_001.txt")),
    ("B_001.txt", include_str!("../../fixtures/reports/B_001.txt")),
    ("A_012.txt", include_str!("../../fixtures/reports/A_012.txt")),
    ("B_012.txt", include_str!("../../fixtures/reports/B_012.txt")),
    ("A_078.txt", include_str!("../../fixtures/reports/A_078.txt")),
    ("B_078.txt", include_str!("../../fixtures/reports/B_078.txt")),
    ("A_144.txt", include_str!("../../fixtures/reports/A_144.txt")),
    ("B_144.txt", include_str!("../../fixtures/reports/B_144.txt")),
    ("A_210.txt", include_str!("../../fixtures/reports/A_210.txt")),
    ("B_210.txt", include_str!("../../fixtures/reports/B_210.txt")),
];

fn parse_name(name: &str) -> Option<(StockId, Day)> {
    let stem = name.strip_suffix(".txt")?;
    let (company, day) = stem.split_once('_')?;
    Some((company.parse().ok()?, day.parse().ok()?))
}

fn parse_body(stock: StockId, day: Day, raw: &str) -> Report {
    let (tone, text) = match raw.split_once('\n') {
        Some((first, rest)) if first.trim_start().starts_with("tone:") => {
            let t = first.trim_start()["tone:".len()..].trim();
            (t.parse::<i8>().unwrap_or(0).clamp(-1, 1), rest)
        }
        _ => (0, raw),
    };
    Report { stock, day, text: text.trim().to_string(), tone }
}

impl ReportLibrary {
    pub fn builtin() -> Self {
        let mut lib = ReportLibrary::default();
        for (name, raw) in BUILTIN {
            let (stock, day) = parse_name(name).expect("builtin fixture name");
            lib.insert(parse_body(stock, day, raw));
        }
        lib
    }

    /// Loads every `X_ddd.txt` file in `dir`; other files are ignored.
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let mut lib = ReportLibrary::default();
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            let name = entry.file_name();
            let Some((stock, day)) = name.to_str().and_then(parse_name) else { continue };
            let raw = std::fs::read_to_string(entry.path())?;
            lib.insert(parse_body(stock, day, &raw));
        }
        Ok(lib)
    }

    pub fn insert(&mut self, report: Report) {
        self.reports.insert((report.day, report.stock), report);
    }

    pub fn days(&self) -> impl Iterator<Item = Day> + '_ {
        let mut days: Vec<Day> = self.reports.keys().map(|(d, _)| *d).collect();
        days.dedup();
        days.into_iter()
    }

    pub fn get(&self, stock: StockId, day: Day) -> Option<&Report> {
        self.reports.get(&(day, stock))
    }

    /// Both companies' reports for `day`.
    pub fn release(&self, day: Day) -> Result<Vec<Report>, CalendarError> {
        let out: Vec<Report> = StockId::ALL
            .iter()
            .filter_map(|&s| self.get(s, day).cloned())
            .collect();
        if out.is_empty() {
            return Err(CalendarError::NotReportDay(day));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_days_and_first_day_narrative() {
        let lib = ReportLibrary::builtin();
        assert_eq!(lib.days().collect::<Vec<_>>(), vec![1, 12, 78, 144, 210]);
        let d1 = lib.release(1).unwrap();
        assert!(d1[0].text.starts_with("Company A has been listed for 10 years"));
        assert!(d1[1].text.starts_with("Company B, as a technology company"));
        assert_eq!((d1[0].tone, d1[1].tone), (-1, 1));
    }

    #[test]
    fn parses_tone_header() {
        let r = parse_body(StockId::A, 5, "tone: -1\nbody text\n");
        assert_eq!(r.tone, -1);
        assert_eq!(r.text, "body text");
        let r = parse_body(StockId::A, 5, "no header");
        assert_eq!((r.tone, r.text.as_str()), (0, "no header"));
    }

    #[test]
    fn from_dir_reads_named_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("A_005.txt"), "tone: +1\nup").unwrap();
        std::fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let lib = ReportLibrary::from_dir(dir.path()).unwrap();
        assert_eq!(lib.release(5).unwrap()[0].text, "up");
        assert!(lib.release(6).is_err());
    }
}
