//! Timestamp text parsing. Everything resolves to signed epoch milliseconds.

use chrono::{DateTime, NaiveDate, NaiveDateTime};

/// Parses a timestamp cell to epoch milliseconds.
///
/// With an empty `formats` list the accepted inputs are, in order: raw
/// integer epoch milliseconds, RFC 3339 / ISO-8601 with zone, ISO-8601
/// without zone ('T' or space separated, optional fractional seconds,
/// UTC assumed), and a bare date (midnight UTC). A non-empty list replaces
/// the defaults with the given `chrono` patterns, tried in order.
pub fn parse_timestamp_ms(s: &str, formats: &[String]) -> Option<i64> {
    if !formats.is_empty() {
        return formats.iter().find_map(|f| parse_with_format(s, f));
    }
    if let Ok(ms) = s.parse::<i64>() {
        return Some(ms);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_millis());
    }
    for pattern in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, pattern) {
            return Some(naive.and_utc().timestamp_millis());
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    None
}

fn parse_with_format(s: &str, format: &str) -> Option<i64> {
    if let Ok(dt) = DateTime::parse_from_str(s, format) {
        return Some(dt.timestamp_millis());
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(s, format) {
        return Some(naive.and_utc().timestamp_millis());
    }
    if let Ok(date) = NaiveDate::parse_from_str(s, format) {
        return Some(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    None
}

/// Renders epoch milliseconds as ISO-8601 UTC with millisecond precision,
/// e.g. `1970-01-01T00:00:10.000Z`. Inverse of the default parse.
pub fn format_timestamp_ms(ms: i64) -> String {
    match DateTime::from_timestamp_millis(ms) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
        // Out of chrono's range; integer form still round-trips.
        None => ms.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_millis_pass_through() {
        assert_eq!(parse_timestamp_ms("0", &[]), Some(0));
        assert_eq!(parse_timestamp_ms("-1500", &[]), Some(-1500));
        assert_eq!(parse_timestamp_ms("10000", &[]), Some(10_000));
    }

    #[test]
    fn iso_with_zone() {
        assert_eq!(parse_timestamp_ms("1970-01-01T00:00:00Z", &[]), Some(0));
        assert_eq!(
            parse_timestamp_ms("1970-01-01T01:00:00+01:00", &[]),
            Some(0)
        );
        assert_eq!(
            parse_timestamp_ms("1970-01-01T00:00:10.500Z", &[]),
            Some(10_500)
        );
    }

    #[test]
    fn iso_without_zone_is_utc() {
        assert_eq!(parse_timestamp_ms("1970-01-01T00:00:10", &[]), Some(10_000));
        assert_eq!(
            parse_timestamp_ms("1970-01-01 00:00:10.25", &[]),
            Some(10_250)
        );
        assert_eq!(parse_timestamp_ms("1970-01-02", &[]), Some(86_400_000));
    }

    #[test]
    fn custom_formats_replace_defaults() {
        let formats = vec!["%d/%m/%Y %H:%M".to_string()];
        assert_eq!(
            parse_timestamp_ms("02/01/1970 00:00", &formats),
            Some(86_400_000)
        );
        // Defaults are disabled when custom formats are given.
        assert_eq!(parse_timestamp_ms("1970-01-01T00:00:00Z", &formats), None);
    }

    #[test]
    fn garbage_is_rejected() {
        assert_eq!(parse_timestamp_ms("", &[]), None);
        assert_eq!(parse_timestamp_ms("yesterday", &[]), None);
        assert_eq!(parse_timestamp_ms("1.5", &[]), None);
    }

    #[test]
    fn format_round_trips() {
        for ms in [0i64, 10_000, 10_500, -1, 1_700_000_000_123] {
            let text = format_timestamp_ms(ms);
            assert_eq!(parse_timestamp_ms(&text, &[]), Some(ms), "text={text}");
        }
    }
}
