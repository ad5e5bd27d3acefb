//! Normalization of historical time expressions and the ordering
//! predicates built on them.
//!
//! Years are signed integers with BC mapped to the negative of the
//! written year: "431 BC" becomes year -431. This keeps the BC test a
//! plain sign check and matches the generated proof code, at the cost
//! of diverging from astronomical year numbering (which would shift by
//! one). Month and day are optional; comparisons fall back to year
//! granularity when either side lacks the finer field.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;

use crate::event::Event;

/// Bare numbers up to this value are read as AD years ("79" -> 79 AD).
/// Anything larger is left as an unrecognized expression.
pub const BARE_YEAR_MAX: i32 = 2100;

/// A calendar point with a signed year. BC years are negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimePoint {
    pub year: i32,
    /// 1..=12 when known.
    pub month: Option<u32>,
    /// 1..=31 when known; only meaningful if `month` is set.
    pub day: Option<u32>,
}

impl TimePoint {
    pub fn year(year: i32) -> Self {
        TimePoint {
            year,
            month: None,
            day: None,
        }
    }

    pub fn new(year: i32, month: Option<u32>, day: Option<u32>) -> Self {
        TimePoint { year, month, day }
    }
}

impl fmt::Display for TimePoint {
    /// Renders the era form of the year ("431 BC", "79 AD"). Month and
    /// day are not rendered; the era form is what reports show.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.year < 0 {
            write!(f, "{} BC", -(self.year as i64))
        } else {
            write!(f, "{} AD", self.year)
        }
    }
}

/// A normalized time value: a single point, a chronological range, or
/// the raw text when nothing was recognized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TimeSpec {
    Point(TimePoint),
    Range { start: TimePoint, end: TimePoint },
    Unknown(String),
}

impl TimeSpec {
    /// True for Point and Range, false for Unknown.
    pub fn is_resolved(&self) -> bool {
        !matches!(self, TimeSpec::Unknown(_))
    }

    /// Earliest possible point, if resolved.
    pub fn earliest(&self) -> Option<&TimePoint> {
        match self {
            TimeSpec::Point(p) => Some(p),
            TimeSpec::Range { start, .. } => Some(start),
            TimeSpec::Unknown(_) => None,
        }
    }

    /// Latest possible point, if resolved.
    pub fn latest(&self) -> Option<&TimePoint> {
        match self {
            TimeSpec::Point(p) => Some(p),
            TimeSpec::Range { end, .. } => Some(end),
            TimeSpec::Unknown(_) => None,
        }
    }

    /// Signed start year, if resolved.
    pub fn start_year(&self) -> Option<i32> {
        self.earliest().map(|p| p.year)
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpec::Point(p) => write!(f, "{}", p),
            TimeSpec::Range { start, end } => {
                if start.year < 0 && end.year < 0 {
                    write!(f, "{}-{} BC", -(start.year as i64), -(end.year as i64))
                } else if start.year >= 0 && end.year >= 0 {
                    write!(f, "{}-{} AD", start.year, end.year)
                } else {
                    write!(f, "{}-{}", start, end)
                }
            }
            TimeSpec::Unknown(raw) => write!(f, "{}", raw),
        }
    }
}

fn point_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*(\d+)\s*(BCE|BC|CE|AD)?\s*$").unwrap())
}

fn range_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*(\d+)\s*(BCE|BC|CE|AD)?\s*[-\u{2013}\u{2014}]\s*(\d+)\s*(BCE|BC|CE|AD)?\s*$")
            .unwrap()
    })
}

fn century_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*(\d+)\s*(?:st|nd|rd|th)\s+century\s*(BCE|BC|CE|AD)?\s*$").unwrap()
    })
}

/// Era suffix sign: BC/BCE negate the written year.
fn era_sign(era: &str) -> i32 {
    match era.to_ascii_uppercase().as_str() {
        "BC" | "BCE" => -1,
        _ => 1,
    }
}

/// Signed year from a digit string and optional era capture.
/// `None` era means a bare number, accepted only up to [`BARE_YEAR_MAX`].
fn signed_year(digits: &str, era: Option<&str>) -> Option<i32> {
    let n: i32 = digits.parse().ok()?;
    match era {
        Some(e) => Some(n.checked_mul(era_sign(e))?),
        None => (n <= BARE_YEAR_MAX).then_some(n),
    }
}

/// Normalize a raw time expression.
///
/// Recognized forms: "431 BC"/"431 BCE", "79 AD"/"79 CE", bare years up
/// to [`BARE_YEAR_MAX`], ranges like "429-427 BCE" (era on either side
/// is inherited by a bare side; en and em dashes accepted), and century
/// expressions ("5th century BC" -> 500-401 BC). Everything else comes
/// back as `Unknown` carrying the raw text; this function never fails.
pub fn parse_time(raw: &str) -> TimeSpec {
    if let Some(caps) = point_re().captures(raw) {
        if let Some(year) = signed_year(&caps[1], caps.get(2).map(|m| m.as_str())) {
            return TimeSpec::Point(TimePoint::year(year));
        }
        return TimeSpec::Unknown(raw.to_string());
    }

    if let Some(caps) = range_re().captures(raw) {
        let era_a = caps.get(2).map(|m| m.as_str());
        let era_b = caps.get(4).map(|m| m.as_str());
        // A bare side inherits the other side's era: "429-427 BCE" reads
        // both years as BCE.
        let (era_a, era_b) = match (era_a, era_b) {
            (None, Some(e)) => (Some(e), Some(e)),
            (Some(e), None) => (Some(e), Some(e)),
            other => other,
        };
        if let (Some(a), Some(b)) = (signed_year(&caps[1], era_a), signed_year(&caps[3], era_b)) {
            let (start, end) = if a <= b { (a, b) } else { (b, a) };
            return TimeSpec::Range {
                start: TimePoint::year(start),
                end: TimePoint::year(end),
            };
        }
        return TimeSpec::Unknown(raw.to_string());
    }

    if let Some(caps) = century_re().captures(raw) {
        let n: i64 = caps[1].parse().unwrap_or(0);
        if n >= 1 && n <= 100 {
            let n = n as i32;
            let sign = caps.get(2).map(|m| era_sign(m.as_str())).unwrap_or(1);
            let (start, end) = if sign < 0 {
                (-(n * 100), -(n * 100 - 99))
            } else {
                (n * 100 - 99, n * 100)
            };
            return TimeSpec::Range {
                start: TimePoint::year(start),
                end: TimePoint::year(end),
            };
        }
    }

    TimeSpec::Unknown(raw.to_string())
}

/// Compare two points chronologically.
///
/// Lexicographic on (year, month, day), except that a missing month or
/// day on either side stops the comparison at the coarser granularity:
/// equal years with a missing month compare equal.
pub fn chronological_compare(a: &TimePoint, b: &TimePoint) -> Ordering {
    match a.year.cmp(&b.year) {
        Ordering::Equal => {}
        ord => return ord,
    }
    let (Some(am), Some(bm)) = (a.month, b.month) else {
        return Ordering::Equal;
    };
    match am.cmp(&bm) {
        Ordering::Equal => {}
        ord => return ord,
    }
    let (Some(ad), Some(bd)) = (a.day, b.day) else {
        return Ordering::Equal;
    };
    ad.cmp(&bd)
}

/// Strict precedence on points: `a` is wholly before `b`.
pub fn point_before(a: &TimePoint, b: &TimePoint) -> bool {
    chronological_compare(a, b) == Ordering::Less
}

/// Strict interval precedence on resolved time values: every instant of
/// `a` is before every instant of `b`. Unknown on either side is false.
pub fn spec_before(a: &TimeSpec, b: &TimeSpec) -> bool {
    match (a.latest(), b.earliest()) {
        (Some(end_a), Some(start_b)) => point_before(end_a, start_b),
        _ => false,
    }
}

/// True iff both events carry resolved times and e1's latest possible
/// time strictly precedes e2's earliest possible time.
pub fn event_before(e1: &Event, e2: &Event) -> bool {
    match (&e1.time, &e2.time) {
        (Some(t1), Some(t2)) => spec_before(t1, t2),
        _ => false,
    }
}

/// True iff the event's time resolves to a point or range starting
/// before year 0. Unknown or absent time is false.
pub fn is_bc_event(e: &Event) -> bool {
    e.time
        .as_ref()
        .and_then(|t| t.start_year())
        .is_some_and(|y| y < 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn point(y: i32) -> TimeSpec {
        TimeSpec::Point(TimePoint::year(y))
    }

    #[test]
    fn parses_bc_point() {
        assert_eq!(parse_time("431 BC"), point(-431));
        assert_eq!(parse_time("431 BCE"), point(-431));
        assert_eq!(parse_time("431bc"), point(-431));
    }

    #[test]
    fn parses_ad_and_bare_points() {
        assert_eq!(parse_time("79 AD"), point(79));
        assert_eq!(parse_time("79 CE"), point(79));
        assert_eq!(parse_time("1453"), point(1453));
        // Bare numbers above the current-era ceiling are not years.
        assert_eq!(
            parse_time("40000"),
            TimeSpec::Unknown("40000".to_string())
        );
    }

    #[test]
    fn parses_bc_range_chronologically() {
        let spec = parse_time("429-427 BCE");
        assert_eq!(
            spec,
            TimeSpec::Range {
                start: TimePoint::year(-429),
                end: TimePoint::year(-427),
            }
        );
        // En dash and reversed order normalize the same way.
        assert_eq!(parse_time("427\u{2013}429 BC"), spec);
    }

    #[test]
    fn parses_mixed_era_range() {
        assert_eq!(
            parse_time("100 BC-50 AD"),
            TimeSpec::Range {
                start: TimePoint::year(-100),
                end: TimePoint::year(50),
            }
        );
    }

    #[test]
    fn parses_century() {
        assert_eq!(
            parse_time("5th century BC"),
            TimeSpec::Range {
                start: TimePoint::year(-500),
                end: TimePoint::year(-401),
            }
        );
        assert_eq!(
            parse_time("1st century AD"),
            TimeSpec::Range {
                start: TimePoint::year(1),
                end: TimePoint::year(100),
            }
        );
    }

    #[test]
    fn unrecognized_text_is_unknown() {
        assert_eq!(
            parse_time("time period"),
            TimeSpec::Unknown("time period".to_string())
        );
        assert_eq!(parse_time(""), TimeSpec::Unknown(String::new()));
    }

    #[test]
    fn compare_examples() {
        let a = TimePoint::year(-431);
        let b = TimePoint::year(-404);
        assert_eq!(chronological_compare(&a, &b), Ordering::Less);
        assert_eq!(chronological_compare(&a, &a), Ordering::Equal);
        assert_eq!(chronological_compare(&b, &a), Ordering::Greater);
    }

    #[test]
    fn compare_falls_back_to_year_when_month_missing() {
        let bare = TimePoint::year(-431);
        let spring = TimePoint::new(-431, Some(3), None);
        assert_eq!(chronological_compare(&bare, &spring), Ordering::Equal);
        let summer = TimePoint::new(-431, Some(6), Some(10));
        assert_eq!(chronological_compare(&spring, &summer), Ordering::Less);
        let later_day = TimePoint::new(-431, Some(6), Some(20));
        assert_eq!(chronological_compare(&summer, &later_day), Ordering::Less);
        let day_unknown = TimePoint::new(-431, Some(6), None);
        assert_eq!(
            chronological_compare(&summer, &day_unknown),
            Ordering::Equal
        );
    }

    /// Independent route: embed each point into a single integer at the
    /// finest granularity both sides share, then compare the integers.
    fn embedding_compare(a: &TimePoint, b: &TimePoint) -> Ordering {
        let (ga, gb) = match (a.month, b.month) {
            (Some(am), Some(bm)) => match (a.day, b.day) {
                (Some(ad), Some(bd)) => (
                    a.year as i64 * 372 + (am as i64 - 1) * 31 + (ad as i64 - 1),
                    b.year as i64 * 372 + (bm as i64 - 1) * 31 + (bd as i64 - 1),
                ),
                _ => (
                    a.year as i64 * 12 + am as i64 - 1,
                    b.year as i64 * 12 + bm as i64 - 1,
                ),
            },
            _ => (a.year as i64, b.year as i64),
        };
        ga.cmp(&gb)
    }

    fn random_point(rng: &mut StdRng) -> TimePoint {
        let year = rng.gen_range(-1000..=1000);
        let month = if rng.gen_bool(0.5) {
            Some(rng.gen_range(1..=12))
        } else {
            None
        };
        let day = match month {
            Some(_) if rng.gen_bool(0.5) => Some(rng.gen_range(1..=31)),
            _ => None,
        };
        TimePoint::new(year, month, day)
    }

    #[test]
    fn compare_agrees_with_integer_embedding_oracle() {
        let mut rng = StdRng::seed_from_u64(0x7e1);
        for _ in 0..1000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            assert_eq!(
                chronological_compare(&a, &b),
                embedding_compare(&a, &b),
                "mismatch on {:?} vs {:?}",
                a,
                b
            );
        }
    }

    #[test]
    fn compare_is_transitive_on_samples() {
        let mut rng = StdRng::seed_from_u64(0x7e2);
        let points: Vec<TimePoint> = (0..30).map(|_| random_point(&mut rng)).collect();
        for a in &points {
            for b in &points {
                for c in &points {
                    if chronological_compare(a, b) != Ordering::Greater
                        && chronological_compare(b, c) != Ordering::Greater
                    {
                        assert_ne!(chronological_compare(a, c), Ordering::Greater);
                    }
                }
            }
        }
    }

    #[test]
    fn spec_before_respects_overlap() {
        let range = parse_time("429-427 BCE");
        let inside = point(-428);
        assert!(!spec_before(&range, &inside));
        assert!(spec_before(&point(-431), &point(-427)));
        assert!(!spec_before(&point(-431), &point(-431)));
        assert!(!spec_before(&TimeSpec::Unknown("n/a".into()), &point(-431)));
    }

    proptest! {
        #[test]
        fn bc_sign_convention(n in 1i64..=4_000_000_000i64) {
            let raw = format!("{} BC", n);
            match parse_time(&raw) {
                TimeSpec::Point(p) => prop_assert_eq!(p.year as i64, -n),
                TimeSpec::Unknown(s) => {
                    // Years beyond i32 stay unrecognized rather than wrapping.
                    prop_assert!(n > i32::MAX as i64);
                    prop_assert_eq!(s, raw);
                }
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }

        #[test]
        fn parse_never_panics_and_renders_to_fixpoint(s in "\\PC{0,40}") {
            let spec = parse_time(&s);
            match &spec {
                TimeSpec::Unknown(raw) => prop_assert_eq!(raw, &s),
                resolved => {
                    let rendered = resolved.to_string();
                    prop_assert_eq!(&parse_time(&rendered), resolved);
                }
            }
        }

        #[test]
        fn rendered_values_reparse(y1 in -3000i32..3000, y2 in -3000i32..3000) {
            let spec = if y1 == y2 {
                TimeSpec::Point(TimePoint::year(y1))
            } else {
                TimeSpec::Range {
                    start: TimePoint::year(y1.min(y2)),
                    end: TimePoint::year(y1.max(y2)),
                }
            };
            prop_assert_eq!(parse_time(&spec.to_string()), spec);
        }
    }
}
