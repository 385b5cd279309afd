use std::fs;
use std::path::Path;

use super::ScanRecord;
use crate::error::{Error, Result};

pub const CSV_MAGIC: &str = "# pendular-sim v1";
pub const CSV_HEADER: &str = "initial,gamma,w,omega,alpha,t,observable,value";

const SIGNIFICANT: usize = 12;

/// C `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 <= |v| < 1e12`. Negative zero prints as `0`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Full file contents for `records`.
pub fn render_csv(records: &[ScanRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 2));
    out.push_str(CSV_MAGIC);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let fields = [
            r.initial.clone(),
            format_number(r.gamma),
            format_number(r.w),
            format_number(r.omega),
            format_number(r.alpha),
            format_number(r.t),
            r.observable.clone(),
            format_number(r.value),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(records: &[ScanRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to write".into()));
    }
    fs::write(path, render_csv(records)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, value: f64) -> ScanRecord {
        ScanRecord {
            initial: "w".into(),
            gamma: 0.5,
            w: 6.0,
            omega: 0.5,
            alpha: std::f64::consts::FRAC_PI_2,
            t,
            observable: "negativity3".into(),
            value,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (20.0, "20"),
            (std::f64::consts::FRAC_PI_2, "1.57079632679"),
            (2.0 * 2f64.sqrt() / 3.0, "0.942809041582"),
            (1e-4, "0.0001"),
            (1.5e-5, "1.5e-05"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-2.5e-300, "-2.5e-300"),
            (0.1 + 0.2, "0.3"),
            (999999999999.9, "1e+12"),
            (f64::INFINITY, "inf"),
            (f64::NAN, "nan"),
        ];
        for (v, expected) in cases {
            assert_eq!(format_number(v), expected, "formatting {v:e}");
        }
    }

    #[test]
    fn one_record() {
        let text = render_csv(&[record(0.0, 1.0)]);
        assert_eq!(
            text,
            "# pendular-sim v1\ninitial,gamma,w,omega,alpha,t,observable,value\nw,0.5,6,0.5,1.57079632679,0,negativity3,1\n"
        );
        assert!(text.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn write_and_reject_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        assert!(write_csv(&[], &path).is_err());
        assert!(!path.exists());

        let records: Vec<_> = (0..4).map(|k| record(k as f64, 0.25 * k as f64)).collect();
        write_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 6);

        let missing = dir.path().join("no/such/dir/out.csv");
        let err = write_csv(&records, &missing).unwrap_err();
        assert!(err.to_string().contains("no/such/dir"));
    }
}
