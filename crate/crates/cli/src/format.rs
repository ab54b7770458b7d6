//! Text emitters and small parsers for flag values.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use resosc::report::fmt_f64;
use resosc::series::format_rational;
use resosc::EnergySeries;

/// `$\dfrac{p}{q}$`, with the sign outside the fraction.
fn latex_rational(r: &BigRational) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let (p, q) = (r.numer().abs(), r.denom());
    if r.is_integer() {
        format!("${sign}{p}$")
    } else {
        format!("${sign}\\dfrac{{{p}}}{{{q}}}$")
    }
}

/// One table row: `n & $\dfrac{1}{2}$ & ... \\[8pt] \hline`.
pub fn series_latex(s: &EnergySeries) -> String {
    let cells: Vec<String> = s.coeffs.iter().map(latex_rational).collect();
    format!("{} & {} \\\\[8pt] \\hline\n", s.level, cells.join(" & "))
}

pub fn series_csv(s: &EnergySeries) -> String {
    let mut out = String::from("level,order,numerator,denominator\n");
    for (k, c) in s.coeffs.iter().enumerate() {
        out.push_str(&format!("{},{k},{},{}\n", s.level, c.numer(), c.denom()));
    }
    out
}

pub fn series_json(s: &EnergySeries) -> String {
    let coeffs: Vec<String> = s.coeffs.iter().map(|c| format!("\"{}\"", format_rational(c))).collect();
    format!("{{\"level\":{},\"order\":{},\"coefficients\":[{}]}}\n", s.level, s.coeffs.len() - 1, coeffs.join(","))
}

pub fn complex_json(z: Complex64) -> String {
    format!("[{},{}]", json_f64(z.re), json_f64(z.im))
}

pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".into()
    }
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; exponents such as `1e-3` are
/// accepted in either part.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("cannot parse complex number {s:?}");
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_s, im_s) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re_s.is_empty() { 0.0 } else { re_s.parse::<f64>().map_err(|_| bad())? };
    let im = match im_s {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(bad())
    }
}
