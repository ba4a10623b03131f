use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::record::DEFAULT_YEAR_RANGE;

/// A cited reference split into author, year and title remainder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawReference {
    pub source_id: String,
    pub author: String,
    pub year: i32,
    pub title: String,
    /// Normalized author field used for matching.
    pub author_key: String,
    /// Normalized title field used for matching.
    pub title_key: String,
    /// The year segment was a range such as `1990-1992`; the first year was kept.
    pub multi_year: bool,
}

impl RawReference {
    /// Normalized `author|year|title` string identifying this variant.
    pub fn member_key(&self) -> String {
        format!("{}|{}|{}", self.author_key, self.year, self.title_key)
    }
}

/// Why a raw reference string did not produce a [`RawReference`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discard {
    Anonymous,
    Yearless,
    Malformed,
}

/// Outcome counts over a batch of raw reference strings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTally {
    pub parsed: usize,
    pub anonymous: usize,
    pub yearless: usize,
    pub malformed: usize,
    pub multi_year: usize,
}

impl ReferenceTally {
    pub fn record(&mut self, outcome: &Result<RawReference, Discard>) {
        match outcome {
            Ok(r) => {
                self.parsed += 1;
                if r.multi_year {
                    self.multi_year += 1;
                }
            }
            Err(Discard::Anonymous) => self.anonymous += 1,
            Err(Discard::Yearless) => self.yearless += 1,
            Err(Discard::Malformed) => self.malformed += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.parsed + self.anonymous + self.yearless + self.malformed
    }

    pub fn discarded(&self) -> usize {
        self.anonymous + self.yearless + self.malformed
    }
}

/// Lower-cases, turns every non-alphanumeric character into a space and
/// collapses runs of whitespace. Diacritics are kept.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Parses a citation-index style reference: comma separated `author, year, remainder`.
///
/// The year is the first segment that is a four-digit year in 1400..=2100
/// (or a `YYYY-YYYY` range, keeping the first year). Volume, page, issue and
/// number segments are removed from the remainder.
pub fn parse_reference_string(source_id: &str, raw: &str) -> Result<RawReference, Discard> {
    parse_reference_in_range(source_id, raw, DEFAULT_YEAR_RANGE)
}

pub(crate) fn parse_reference_in_range(
    source_id: &str,
    raw: &str,
    years: RangeInclusive<i32>,
) -> Result<RawReference, Discard> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(Discard::Malformed);
    }
    let segments: Vec<&str> = raw.split(',').map(str::trim).collect();

    let year_pos = segments
        .iter()
        .position(|s| year_segment(s, &years).is_some());
    let author_end = year_pos.unwrap_or(1);
    let author = segments[..author_end].join(", ");
    if is_anonymous(&author) {
        return Err(Discard::Anonymous);
    }
    let Some(year_pos) = year_pos else {
        return Err(Discard::Yearless);
    };
    let (year, multi_year) = year_segment(segments[year_pos], &years).expect("located above");

    let title = segments[year_pos + 1..]
        .iter()
        .filter(|s| !s.is_empty() && !is_locator(s))
        .copied()
        .collect::<Vec<_>>()
        .join(", ");

    Ok(RawReference {
        source_id: source_id.to_string(),
        author_key: normalize_text(&author),
        title_key: normalize_text(&title),
        author,
        year,
        title,
        multi_year,
    })
}

fn is_anonymous(author: &str) -> bool {
    let stripped: String = author
        .chars()
        .filter(|c| !matches!(c, '[' | ']' | '(' | ')' | '{' | '}' | '<' | '>'))
        .collect();
    let stripped = stripped.trim();
    stripped.is_empty() || stripped.eq_ignore_ascii_case("anonymous")
}

fn four_digit_year(s: &str, years: &RangeInclusive<i32>) -> Option<i32> {
    if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok().filter(|y| years.contains(y))
    } else {
        None
    }
}

/// Returns the year and whether the segment was a year range.
fn year_segment(s: &str, years: &RangeInclusive<i32>) -> Option<(i32, bool)> {
    if let Some(y) = four_digit_year(s, years) {
        return Some((y, false));
    }
    let (first, rest) = s.split_once(['-', '/'])?;
    let y = four_digit_year(first.trim(), years)?;
    let rest = rest.trim();
    let digits_ok = matches!(rest.len(), 2 | 4) && rest.bytes().all(|b| b.is_ascii_digit());
    digits_ok.then_some((y, true))
}

/// Volume, page, number and issue segments: `V12`, `P123`, `P12-30`, `N4`,
/// `ISS2`, or a bare digit run.
fn is_locator(segment: &str) -> bool {
    let s = segment.trim().to_ascii_uppercase();
    let digits = ["ISS", "V", "P", "N"]
        .iter()
        .find_map(|prefix| s.strip_prefix(prefix))
        .map(str::trim_start)
        .unwrap_or(&s);
    let (head, tail) = match digits.split_once('-') {
        Some((h, t)) => (h, Some(t)),
        None => (digits, None),
    };
    let all_digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    all_digits(head) && tail.is_none_or(all_digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(raw: &str) -> Result<RawReference, Discard> {
        parse_reference_string("src", raw)
    }

    #[test]
    fn splits_author_year_and_trims_locators() {
        let r = parse("Smith J, 1990, Hist J, V33, P123").unwrap();
        assert_eq!(r.author, "Smith J");
        assert_eq!(r.year, 1990);
        assert_eq!(r.title, "Hist J");
        assert_eq!(r.author_key, "smith j");
        assert_eq!(r.title_key, "hist j");
        assert!(!r.multi_year);
    }

    #[test]
    fn anonymous_author_discarded() {
        assert_eq!(
            parse("[Anonymous], 1990, Some Title"),
            Err(Discard::Anonymous)
        );
        assert_eq!(
            parse("ANONYMOUS, 1990, Some Title"),
            Err(Discard::Anonymous)
        );
        assert_eq!(parse("1990, Some Title"), Err(Discard::Anonymous));
    }

    #[test]
    fn missing_year_discarded() {
        assert_eq!(parse("Smith J, Some Title"), Err(Discard::Yearless));
        assert_eq!(parse("Smith J, 3000, Some Title"), Err(Discard::Yearless));
        assert_eq!(parse("   "), Err(Discard::Malformed));
    }

    #[test]
    fn year_range_takes_first_year_and_flags() {
        let r = parse("Braudel F, 1949-1966, La Mediterranee, V2").unwrap();
        assert_eq!(r.year, 1949);
        assert!(r.multi_year);
        assert_eq!(r.title, "La Mediterranee");
    }

    #[test]
    fn multi_segment_author_and_issue_tokens() {
        let r =
            parse("Le Roy Ladurie, E., 1975, Montaillou, village occitan, ISS4, N2, 12, p33-45")
                .unwrap();
        assert_eq!(r.author, "Le Roy Ladurie, E.");
        assert_eq!(r.title, "Montaillou, village occitan");
        assert_eq!(r.title_key, "montaillou village occitan");
    }

    #[test]
    fn locator_detection() {
        for s in ["V33", "v33", "P123", "N4", "ISS2", "iss 2", "123", "P12-30"] {
            assert!(is_locator(s), "{s}");
        }
        for s in ["Hist J", "Vico", "Past Present", "1984a", "P", ""] {
            assert!(!is_locator(s), "{s}");
        }
    }

    #[test]
    fn normalization_keeps_diacritics() {
        assert_eq!(
            normalize_text("  Économie,  et--Société! "),
            "économie et société"
        );
        assert_eq!(normalize_text("smith, j."), "smith j");
    }

    #[test]
    fn tally_accounts_for_every_string() {
        let mut tally = ReferenceTally::default();
        for raw in [
            "Smith J, 1990, T",
            "[Anonymous], 1990, T",
            "Smith, T",
            "",
            "A B, 1990-91, T",
        ] {
            tally.record(&parse(raw));
        }
        assert_eq!(tally.total(), 5);
        assert_eq!(
            (
                tally.parsed,
                tally.anonymous,
                tally.yearless,
                tally.malformed
            ),
            (2, 1, 1, 1)
        );
        assert_eq!(tally.multi_year, 1);
    }
}
