//! CSV rendering of traces and sweep tables.

use std::fmt::Write;

use flatrack_core::sim::SimTrace;

/// `%.9g`: nine significant digits, trailing zeros dropped, scientific
/// notation outside `1e-4 ≤ |x| < 1e9`.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn trace_header(n: usize, m: usize) -> String {
    let mut cols = vec!["t".to_string()];
    for (prefix, count) in [("x", n), ("u", m), ("y", m), ("r", m), ("yhat", m)] {
        cols.extend((1..=count).map(|i| format!("{prefix}{i}")));
    }
    cols.push("sat_flag".into());
    cols.join(",")
}

/// One row per sample: `t,x…,u…,y…,r…,yhat…,sat_flag`.
pub fn trace_csv(trace: &SimTrace) -> String {
    let n = trace.states.first().map_or(0, |x| x.dim());
    let m = trace.inputs.first().map_or(0, |u| u.dim());
    let mut out = trace_header(n, m);
    out.push('\n');
    for k in 0..trace.len() {
        out.push_str(&fmt_g9(trace.times[k]));
        for seq in [&trace.states, &trace.inputs, &trace.outputs, &trace.references, &trace.predictions] {
            for v in seq[k].iter() {
                out.push(',');
                out.push_str(&fmt_g9(*v));
            }
        }
        let _ = writeln!(out, ",{}", u8::from(trace.flags[k].saturated));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(1.0), "1");
        assert_eq!(fmt_g9(0.1), "0.1");
        assert_eq!(fmt_g9(-2.5), "-2.5");
        assert_eq!(fmt_g9(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt_g9(123456789.0), "123456789");
        assert_eq!(fmt_g9(1234567891.0), "1.23456789e+09");
        assert_eq!(fmt_g9(0.0001), "0.0001");
        assert_eq!(fmt_g9(0.00001234), "1.234e-05");
        assert_eq!(fmt_g9(-7.25e-17), "-7.25e-17");
        assert_eq!(fmt_g9(9.999999999), "10");
    }

    #[test]
    fn header_lists_every_channel() {
        assert_eq!(
            trace_header(2, 1),
            "t,x1,x2,u1,y1,r1,yhat1,sat_flag"
        );
        assert_eq!(
            trace_header(4, 2),
            "t,x1,x2,x3,x4,u1,u2,y1,y2,r1,r2,yhat1,yhat2,sat_flag"
        );
    }
}
