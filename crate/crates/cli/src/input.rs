use std::io::Read;
use std::str::FromStr;

use bidisc_core::Point2;
use num_complex::Complex64;
use serde::de::DeserializeOwned;

/// Reads a file, or standard input when the path is "-".
pub fn read_text(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, String> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {path}: {e}"))
}

/// Parses "(s,p)" or "s,p" where each coordinate is a complex literal such
/// as `1`, `-0.5i` or `0.3+2i`.
pub fn parse_point(text: &str) -> Result<Point2, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t);
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected a point \"(s,p)\", got {text:?}"));
    }
    let parse = |s: &str| {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        Complex64::from_str(&s).map_err(|_| format!("not a complex number: {s:?}"))
    };
    Ok(Point2::new(parse(parts[0])?, parse(parts[1])?))
}
