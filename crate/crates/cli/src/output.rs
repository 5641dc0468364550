//! Fixed output schemas.

use std::fmt::Write as _;

use irrev_core::measures::GapPoint;
use irrev_core::Complex64;
use serde::Serialize;

pub const SWEEP_CSV_HEADER: &str =
    "nu,f,ed_plus_bits,epsilon_bits,co_epsilon_bits,gap_bits,relative_gap";

/// 17 significant digits, scientific.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_csv(points: &[GapPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 180);
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        let row = [
            p.nu,
            p.f,
            p.ed_plus,
            p.epsilon,
            p.co_epsilon,
            p.gap,
            p.relative_gap,
        ];
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct SweepDocument<'a> {
    pub d: usize,
    pub seed: u64,
    pub restarts: usize,
    pub points: &'a [GapPoint],
}

pub fn sweep_json(doc: &SweepDocument<'_>) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// `a+bi` with both parts in [`num`] format.
pub fn complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", num(z.re), sign, num(z.im.abs()))
}

pub fn joined<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    let mut s = String::new();
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let _ = write!(s, "{}", f(it));
    }
    s
}
