//! Parsers for command-line angles and spins.

use std::f64::consts::PI;

use gbi_core::HalfInteger;

/// Parses an angle in radians. Besides plain numbers, multiples of π are
/// accepted as `pi`, `-pi/2`, `3pi/4`, `3*pi/4`, `0.5pi` or with `π`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase().replace('π', "pi");
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| format!("invalid angle '{s}'"))?,
        Some(at) => {
            let coef = t[..at].strip_suffix('*').unwrap_or(&t[..at]);
            let coef = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("invalid coefficient in angle '{s}'"))?,
            };
            let rest = &t[at + 2..];
            let den = match rest {
                "" => 1.0,
                r => {
                    let d = r
                        .strip_prefix('/')
                        .and_then(|d| d.parse::<f64>().ok())
                        .ok_or_else(|| format!("invalid angle '{s}'"))?;
                    if d == 0.0 {
                        return Err(format!("zero denominator in angle '{s}'"));
                    }
                    d
                }
            };
            coef * PI / den
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle '{s}' is not finite"))
    }
}

/// Parses a spin written as a fraction (`1/2`, `3/2`, `2/2`) or a decimal
/// (`0.5`, `1`, `1.5`). Values that are not positive multiples of 1/2 are
/// rejected.
pub fn parse_spin(s: &str) -> Result<HalfInteger, String> {
    let t = s.trim();
    let twice = match t.split_once('/') {
        Some((num, den)) => {
            let num: u32 = num.trim().parse().map_err(|_| format!("invalid spin '{s}'"))?;
            let den: u32 = den.trim().parse().map_err(|_| format!("invalid spin '{s}'"))?;
            match den {
                1 => num.checked_mul(2),
                2 => Some(num),
                _ => None,
            }
            .ok_or_else(|| format!("spin '{s}' is not a multiple of 1/2"))?
        }
        None => {
            let v: f64 = t.parse().map_err(|_| format!("invalid spin '{s}'"))?;
            let twice = 2.0 * v;
            if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.round() > u32::MAX as f64 {
                return Err(format!("spin '{s}' is not a multiple of 1/2"));
            }
            twice.round() as u32
        }
    };
    HalfInteger::from_twice(twice).map_err(|e| e.to_string())
}
