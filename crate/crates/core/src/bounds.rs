//! Size recurrences for universal trees and their closed-form bounds.
//!
//! All values are exact [`BigUint`]s; ratio checks cross-multiply instead of
//! dividing, so no rounding ever happens.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Memoised values of `f` and `g`.
#[derive(Debug, Default)]
pub struct BoundTable {
    f: HashMap<(u64, u32), BigUint>,
    g: HashMap<(u64, u32), BigUint>,
}

impl BoundTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `f(n,h) = f(n,h-1) + f(⌊n/2⌋,h) + f(n-1-⌊n/2⌋,h)` with `f(n,1) = n`,
    /// `f(1,h) = 1` and `f(0,h) = 0`.
    pub fn f(&mut self, n: u64, h: u32) -> BigUint {
        assert!(h >= 1, "height must be at least 1");
        if n <= 1 {
            return BigUint::from(n);
        }
        if h == 1 {
            return BigUint::from(n);
        }
        if let Some(v) = self.f.get(&(n, h)) {
            return v.clone();
        }
        let half = n / 2;
        let v = self.f(n, h - 1) + self.f(half, h) + self.f(n - 1 - half, h);
        self.f.insert((n, h), v.clone());
        v
    }

    /// `g(n,h) = Σ_{δ=1..n} g(⌊n/δ⌋, h-1)` with `g(n,1) = n`, `g(1,h) = 1`.
    pub fn g(&mut self, n: u64, h: u32) -> BigUint {
        assert!(n >= 1 && h >= 1, "g is defined for n, h >= 1");
        if n == 1 || h == 1 {
            return BigUint::from(n);
        }
        if let Some(v) = self.g.get(&(n, h)) {
            return v.clone();
        }
        // ⌊n/δ⌋ is constant on runs of δ; sum each run at once.
        let mut total = BigUint::zero();
        let mut delta = 1;
        while delta <= n {
            let q = n / delta;
            let last = n / q;
            total += self.g(q, h - 1) * BigUint::from(last - delta + 1);
            delta = last + 1;
        }
        self.g.insert((n, h), total.clone());
        total
    }
}

pub fn f_recurrence(n: u64, h: u32) -> BigUint {
    BoundTable::new().f(n, h)
}

pub fn g_recurrence(n: u64, h: u32) -> BigUint {
    BoundTable::new().g(n, h)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn floor_log2(n: u64) -> u64 {
    assert!(n >= 1);
    63 - n.leading_zeros() as u64
}

pub fn ceil_log2(n: u64) -> u64 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        floor_log2(n - 1) + 1
    }
}

/// `2^⌈log n⌉ · C(⌈log n⌉ + h - 1, ⌈log n⌉)`.
pub fn f_upper_closed(n: u64, h: u32) -> BigUint {
    let k = ceil_log2(n);
    (BigUint::one() << k) * binomial(k + h as u64 - 1, k)
}

/// `C(⌊log n⌋ + h - 1, ⌊log n⌋)`.
pub fn g_lower_closed(n: u64, h: u32) -> BigUint {
    let k = floor_log2(n);
    binomial(k + h as u64 - 1, k)
}

/// `2^p · C(p + h - 1, p)`.
pub fn f_bar_closed(p: u64, h: u32) -> BigUint {
    (BigUint::one() << p) * binomial(p + h as u64 - 1, p)
}

pub fn g_bar_closed(p: u64, h: u32) -> BigUint {
    binomial(p + h as u64 - 1, p)
}

/// `F̄(p,h) = F̄(p,h-1) + 2·F̄(p-1,h)`, `F̄(p,1) = 2^p`, `F̄(0,h) = 1`,
/// tabulated for `p <= p_max`, `h <= h_max` (index `[p][h]`, `h = 0` unused).
pub fn f_bar_table(p_max: u64, h_max: u32) -> Vec<Vec<BigUint>> {
    bar_table(p_max, h_max, 2u32)
}

/// `Ḡ(p,h) = Ḡ(p,h-1) + Ḡ(p-1,h)`, `Ḡ(p,1) = 1`, `Ḡ(0,h) = 1`.
pub fn g_bar_table(p_max: u64, h_max: u32) -> Vec<Vec<BigUint>> {
    bar_table(p_max, h_max, 1u32)
}

fn bar_table(p_max: u64, h_max: u32, factor: u32) -> Vec<Vec<BigUint>> {
    let factor = BigUint::from(factor);
    let mut t = vec![vec![BigUint::zero(); h_max as usize + 1]; p_max as usize + 1];
    for p in 0..=p_max as usize {
        for h in 1..=h_max as usize {
            t[p][h] = if p == 0 {
                BigUint::one()
            } else if h == 1 {
                factor.pow(p as u32)
            } else {
                &t[p][h - 1] + &factor * &t[p - 1][h]
            };
        }
    }
    t
}

/// Outcome of a grid check; `violations` is empty when everything holds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl BoundReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(describe());
        }
    }
}

/// Recurrences against closed forms for `F̄` and `Ḡ`, and `F(p,h) = f(2^p,h) <= F̄(p,h)`,
/// `G(p,h) = g(2^p,h) >= Ḡ(p,h)`, for `p <= p_max`, `1 <= h <= h_max`.
pub fn check_closed_forms(p_max: u64, h_max: u32) -> BoundReport {
    let mut report = BoundReport::default();
    let mut table = BoundTable::new();
    let fb = f_bar_table(p_max, h_max);
    let gb = g_bar_table(p_max, h_max);
    for p in 0..=p_max {
        for h in 1..=h_max {
            let (fr, gr) = (&fb[p as usize][h as usize], &gb[p as usize][h as usize]);
            let (fc, gc) = (f_bar_closed(p, h), g_bar_closed(p, h));
            report.check(*fr == fc, || format!("F̄({p},{h}): recurrence {fr} != closed form {fc}"));
            report.check(*gr == gc, || format!("Ḡ({p},{h}): recurrence {gr} != closed form {gc}"));
            let n = 1u64 << p;
            let f = table.f(n, h);
            let g = table.g(n, h);
            report.check(f <= fc, || format!("F({p},{h}) = {f} exceeds F̄ = {fc}"));
            report.check(g >= gc, || format!("G({p},{h}) = {g} is below Ḡ = {gc}"));
        }
    }
    report
}

/// `f(n,h) <= g(n,h) · 2^⌈log n⌉ · (⌊log n⌋ + h) / ⌊log n⌋` for `2 <= n <= n_max`.
pub fn check_ratio(n_max: u64, h_max: u32) -> BoundReport {
    let mut report = BoundReport::default();
    let mut table = BoundTable::new();
    for n in 2..=n_max {
        let lo = floor_log2(n);
        let hi = ceil_log2(n);
        for h in 1..=h_max {
            let f = table.f(n, h);
            let g = table.g(n, h);
            let lhs = &f * BigUint::from(lo);
            let rhs = (&g << hi) * BigUint::from(lo + h as u64);
            report.check(lhs <= rhs, || format!("n={n} h={h}: f={f} g={g} breaks the ratio bound"));
        }
    }
    report
}

/// The chain `g_lower <= g <= f <= f_upper` on `1 <= n <= n_max`, `1 <= h <= h_max`.
pub fn check_chain(n_max: u64, h_max: u32) -> BoundReport {
    let mut report = BoundReport::default();
    let mut table = BoundTable::new();
    for n in 1..=n_max {
        for h in 1..=h_max {
            let f = table.f(n, h);
            let g = table.g(n, h);
            let lo = g_lower_closed(n, h);
            let hi = f_upper_closed(n, h);
            report.check(lo <= g, || format!("n={n} h={h}: g_lower {lo} > g {g}"));
            report.check(g <= f, || format!("n={n} h={h}: g {g} > f {f}"));
            report.check(f <= hi, || format!("n={n} h={h}: f {f} > f_upper {hi}"));
        }
    }
    report
}
