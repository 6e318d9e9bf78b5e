//! Writers and readers for the artifact formats: Pajek networks and
//! matrices, CSV tables, and SVG maps.

pub mod pajek;
pub mod svg;
pub mod tables;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Fill colors for factors, cycling after twelve. Pajek names paired with
/// the SVG color drawn for them.
pub const PALETTE: [(&str, &str); 12] = [
    ("Red", "#e41a1c"),
    ("Blue", "#377eb8"),
    ("Green", "#4daf4a"),
    ("Purple", "#984ea3"),
    ("Orange", "#ff7f00"),
    ("Yellow", "#ffff33"),
    ("Brown", "#a65628"),
    ("Pink", "#f781bf"),
    ("Gray", "#999999"),
    ("Cyan", "#66c2a5"),
    ("Salmon", "#fc8d62"),
    ("Lavender", "#8da0cb"),
];

pub fn palette_name(group: usize) -> &'static str {
    PALETTE[group % PALETTE.len()].0
}

pub fn palette_hex(group: usize) -> &'static str {
    PALETTE[group % PALETTE.len()].1
}

pub fn palette_index(name: &str) -> Option<usize> {
    PALETTE.iter().position(|(n, _)| n.eq_ignore_ascii_case(name))
}

/// `%g`-style rendering with six significant digits: trailing zeros
/// dropped, scientific notation outside `1e-4 <= |x| < 1e6`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::write(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        let cases = [
            (12.0, "12"),
            (0.793650793650, "0.793651"),
            (1.0 / 3.0, "0.333333"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (999999.5, "1e+06"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig6(x), want, "{x}");
        }
    }

    #[test]
    fn palette_lookup() {
        assert_eq!(palette_index("red"), Some(0));
        assert_eq!(palette_name(13), "Blue");
        assert_eq!(palette_index("Chartreuse"), None);
    }
}
