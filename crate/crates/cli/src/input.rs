use std::path::Path;

use orthocalc_core::mat2::C;
use orthocalc_core::{Error, Result};
use serde::de::DeserializeOwned;

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` with optional exponents.
pub fn parse_complex(s: &str) -> Result<C> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|_| bad());
    };
    // Split before the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(C::new(re, im))
}

/// Reads `arg` as inline JSON when it looks like JSON, else as a file path.
pub fn json_arg<T: DeserializeOwned>(arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        read(arg)?
    };
    Ok(serde_json::from_str(&text)?)
}

pub fn read(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("3+0i", (3.0, 0.0)),
            ("1+2i", (1.0, 2.0)),
            ("-0.5", (-0.5, 0.0)),
            ("2i", (0.0, 2.0)),
            ("-i", (0.0, -1.0)),
            ("1e-3-2.5i", (1e-3, -2.5)),
            ("1.5e+2+1e-2i", (150.0, 0.01)),
            (" 4 - 1i ", (4.0, -1.0)),
        ];
        for (s, (re, im)) in cases {
            assert_eq!(parse_complex(s).unwrap(), C::new(re, im), "{s}");
        }
        for s in ["", "abc", "1+2", "i+1"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
