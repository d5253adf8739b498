//! Line-oriented text format for polynomials.
//!
//! ```text
//! # poly dim=1 cap=4
//! 1.5e0 -2e-1 | 1:2 | 2:1
//! ```
//! One term per line: real part, imaginary part, then the `xi` and `eta`
//! exponent lists. Coefficients are either shortest round-trip decimals or
//! C99 hex floats; both parse back bit-exactly.

use num_complex::Complex64;
use std::fmt::Write;

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::PolyError;

/// Render a float as a C99 hexadecimal literal.
pub fn format_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let frac = format!("{mant:013x}");
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp:+}")
    }
}

fn pow2(mut k: i64, mut x: f64) -> f64 {
    let step = |e: i64| f64::from_bits(((e + 1023) as u64) << 52);
    while k > 1000 {
        x *= step(1000);
        k -= 1000;
    }
    while k < -1000 {
        x *= step(-1000);
        k += 1000;
    }
    x * step(k)
}

/// Parse a C99 hex float (as written by [`format_hex`]).
pub fn parse_hex(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = match body {
        "nan" => f64::NAN,
        "inf" => f64::INFINITY,
        _ => {
            let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"))?;
            let (mant_str, exp_str) = body.split_once(['p', 'P'])?;
            let exp: i64 = exp_str.parse().ok()?;
            let (int_part, frac_part) = mant_str.split_once('.').unwrap_or((mant_str, ""));
            if int_part.is_empty() && frac_part.is_empty() {
                return None;
            }
            let mut mant: u128 = 0;
            for ch in int_part.chars().chain(frac_part.chars()) {
                let d = ch.to_digit(16)? as u128;
                mant = mant.checked_mul(16)?.checked_add(d)?;
            }
            pow2(exp - 4 * frac_part.len() as i64, mant as f64)
        }
    };
    Some(if neg { -v } else { v })
}

fn parse_float(tok: &str) -> Result<f64, PolyError> {
    let t = tok.trim();
    let hexish = t.trim_start_matches(['-', '+']);
    let v = if hexish.starts_with("0x") || hexish.starts_with("0X") || hexish == "nan" || hexish == "inf" {
        parse_hex(t)
    } else {
        t.parse::<f64>().ok()
    };
    v.ok_or_else(|| PolyError::Parse(format!("bad number `{tok}`")))
}

impl Polynomial<Complex64> {
    /// Serialize; `hex` selects hex-float coefficients.
    pub fn to_text(&self, hex: bool) -> String {
        let mut out = String::new();
        let cap = self.cap().map(|c| c.to_string()).unwrap_or_else(|| "none".into());
        let _ = writeln!(out, "# poly dim={} cap={}", self.dim(), cap);
        for (m, c) in self.terms() {
            let (re, im) = if hex { (format_hex(c.re), format_hex(c.im)) } else { (format!("{:e}", c.re), format!("{:e}", c.im)) };
            let _ = writeln!(out, "{re} {im} {}", m.to_text());
        }
        out
    }

    /// Parse the text format. Without a header the dimension is taken from
    /// the first mode label (1 if there are none).
    pub fn from_text(text: &str) -> Result<Self, PolyError> {
        let mut dim: Option<usize> = None;
        let mut cap: Option<u32> = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                for tok in h.split_whitespace() {
                    if let Some(d) = tok.strip_prefix("dim=") {
                        dim = Some(d.parse().map_err(|_| PolyError::Parse(format!("bad dim `{d}`")))?);
                    } else if let Some(c) = tok.strip_prefix("cap=") {
                        cap = if c == "none" { None } else { Some(c.parse().map_err(|_| PolyError::Parse(format!("bad cap `{c}`")))?) };
                    }
                }
                continue;
            }
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 3 {
                return Err(PolyError::Parse(format!("line {}: expected `re im | xi | eta`", lineno + 1)));
            }
            let nums: Vec<&str> = parts[0].split_whitespace().collect();
            if nums.len() != 2 {
                return Err(PolyError::Parse(format!("line {}: expected two coefficient fields", lineno + 1)));
            }
            let c = Complex64::new(parse_float(nums[0])?, parse_float(nums[1])?);
            let m = Monomial::parse_sections(parts[1], parts[2])?;
            rows.push((m, c));
        }
        let dim = dim.or_else(|| rows.iter().find_map(|(m, _)| m.dim())).unwrap_or(1);
        let mut p = match cap {
            Some(k) => Polynomial::zero_capped(dim, k),
            None => Polynomial::zero(dim),
        };
        for (m, c) in rows {
            p.add_term(m, c)?;
        }
        Ok(p)
    }
}
