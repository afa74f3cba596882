//! JSON emission with every float printed at 17 significant digits, so that
//! records round-trip exactly and repeated runs are byte-identical.

use serde::Serialize;
use serde_json::ser::Formatter;

struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{}", fmt_f64(value))
        } else {
            write!(writer, "null")
        }
    }
}

/// 17-significant-digit scientific form.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serializer emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let xs = [1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, -0.0, 123456.789];
        for &x in &xs {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn json_uses_formatter() {
        #[derive(Serialize)]
        struct R {
            v: f64,
        }
        let s = to_json_string(&R { v: 0.1 }).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
    }
}
