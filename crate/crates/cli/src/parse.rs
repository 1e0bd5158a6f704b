//! Command-line literals: complex numbers, number lists and ranges.

use std::f64::consts::PI;

use loewner_rom::dataset::logspace;
use loewner_rom::linalg::c64;
use loewner_rom::C64;

/// Parses `a`, `bj`, `a+bj` or `a-bj` (`i` is accepted for `j`).
pub fn complex(text: &str) -> Result<C64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex literal '{text}'");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().map(|re| c64(re, 0.0)).map_err(|_| bad());
    };
    // The split sign is the last +/- that is not the leading sign or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(c64(re, imag(&body[i..])?))
        }
        None => Ok(c64(0.0, imag(body)?)),
    }
}

/// Comma separated complex literals.
pub fn complex_list(text: &str) -> Result<Vec<C64>, String> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(complex).collect()
}

/// Real values from a comma separated list whose items are numbers, `start:step:stop`
/// ranges (stop included up to rounding) or `log:lo:hi:n` logarithmic grids.
pub fn real_list(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("invalid number '{s}' in '{item}'"));
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [start, step, stop] => {
                let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
                if !(step > 0.0) || stop < start {
                    return Err(format!("range '{item}' needs step > 0 and stop >= start"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| start + step * i as f64));
            }
            ["log", lo, hi, n] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                let n: usize = n.parse().map_err(|_| format!("invalid count in '{item}'"))?;
                if !(lo > 0.0 && hi >= lo) {
                    return Err(format!("logarithmic grid '{item}' needs 0 < lo <= hi"));
                }
                out.extend(logspace(lo, hi, n));
            }
            _ => return Err(format!("cannot parse '{item}' as a number, range or log grid")),
        }
    }
    if out.is_empty() {
        return Err(format!("empty list '{text}'"));
    }
    Ok(out)
}

/// Integer list with the same syntax as [`real_list`] (no log grids).
pub fn usize_list(text: &str) -> Result<Vec<usize>, String> {
    real_list(text)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("'{v}' is not a nonnegative integer"))
            }
        })
        .collect()
}

/// Angular frequency from a frequency given in rad/s or Hz.
pub fn to_rad(w: f64, hz: bool) -> f64 {
    if hz {
        2.0 * PI * w
    } else {
        w
    }
}
