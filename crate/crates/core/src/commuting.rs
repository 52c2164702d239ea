//! Commuting predicates for involutions and structural enumeration of the
//! commuting neighbors of a class member inside a label window.

use crate::conjugacy::{class_of, ClassDescriptor};
use crate::element::{AffineElement, Sign};
use crate::error::{Error, Result};
use crate::involution::{
    is_involution, labelled_cycle_form, LabelledCycle, LabelledCycleForm, LabelledCycleType,
};
use std::collections::BTreeSet;

/// Ground truth: `xy = yx` by direct multiplication.
pub fn commutes_oracle(x: &AffineElement, y: &AffineElement) -> Result<bool> {
    if x.n() != y.n() {
        return Err(Error::RankMismatch(x.n(), y.n()));
    }
    Ok(x.multiply(y)? == y.multiply(x)?)
}

/// Fast commuting test for involutions: the permutation parts must commute
/// pointwise, and the commutator translation `v_x^{s_y} + v_y - v_y^{s_x} -
/// v_x` must vanish. Equivalent to the per-orbit label rules of the commuting
/// lemmas, which it uses as the rejection order: the sigma scan rejects
/// incompatible orbit shapes before any translation work.
pub fn commutes_fast(x: &AffineElement, y: &AffineElement) -> Result<bool> {
    if x.n() != y.n() {
        return Err(Error::RankMismatch(x.n(), y.n()));
    }
    if !is_involution(x) || !is_involution(y) {
        return Err(Error::NotAnInvolution);
    }
    // sigma parts commute?
    for i in 0..x.n() {
        let tx = x.sigma.target(i);
        let ty = y.sigma.target(i);
        if x.sigma.target(ty) != y.sigma.target(tx) {
            return Ok(false);
        }
        let sign_xy = x.sigma.sign(i) == y.sigma.sign(tx);
        let sign_yx = y.sigma.sign(i) == x.sigma.sign(ty);
        if sign_xy != sign_yx {
            return Ok(false);
        }
    }
    // translation condition
    let vx_y = y.sigma.act_on_vector(&x.v)?;
    let vy_x = x.sigma.act_on_vector(&y.v)?;
    for i in 0..x.n() {
        if vx_y[i] + y.v[i] != vy_x[i] + x.v[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

fn window_labels(window: i64) -> impl Iterator<Item = i64> {
    -window..=window
}

fn in_window(label: i64, window: i64) -> bool {
    label.abs() <= window
}

/// Local 4-point commuting check used when pairing two transpositions of `x`
/// against a crossed pair of candidate cycles.
fn local_pair_commutes(
    x_cycles: (&LabelledCycle, &LabelledCycle),
    y_cycles: (&LabelledCycle, &LabelledCycle),
    points: &[usize; 4],
) -> bool {
    let reindex = |c: &LabelledCycle| -> LabelledCycle {
        let map = |p: usize| points.iter().position(|&q| q == p).unwrap() + 1;
        match *c {
            LabelledCycle::PosTransposition { a, b, label } => {
                let (ma, mb) = (map(a), map(b));
                if ma < mb {
                    LabelledCycle::PosTransposition { a: ma, b: mb, label }
                } else {
                    LabelledCycle::PosTransposition { a: mb, b: ma, label: -label }
                }
            }
            LabelledCycle::NegTransposition { a, b, label } => {
                let (ma, mb) = (map(a), map(b));
                LabelledCycle::NegTransposition { a: ma.min(mb), b: ma.max(mb), label }
            }
            LabelledCycle::NegOneCycle { point, label } => {
                LabelledCycle::NegOneCycle { point: map(point), label }
            }
            LabelledCycle::FixedPoint { point } => LabelledCycle::FixedPoint { point: map(point) },
        }
    };
    let xl = LabelledCycleForm::new(4, vec![reindex(x_cycles.0), reindex(x_cycles.1)])
        .expect("four distinct points")
        .to_element();
    let yl = LabelledCycleForm::new(4, vec![reindex(y_cycles.0), reindex(y_cycles.1)])
        .expect("four distinct points")
        .to_element();
    commutes_oracle(&xl, &yl).expect("equal ranks")
}

struct NeighborSearch<'a> {
    cycles: &'a [LabelledCycle],
    frozen: &'a BTreeSet<usize>,
    window: i64,
    target: LabelledCycleType,
    descriptor: &'a ClassDescriptor,
    x: &'a AffineElement,
    solo_cache: Vec<Vec<Vec<LabelledCycle>>>,
    pair_cache: Vec<Vec<Vec<LabelledCycle>>>,
    out: Vec<AffineElement>,
}

/// Remaining budget of cycles still to be placed.
#[derive(Clone, Copy)]
struct Budget {
    m: isize,
    k_e: isize,
    k_o: isize,
    l: isize,
}

impl Budget {
    fn from_type(ty: LabelledCycleType) -> Self {
        Budget { m: ty.m as isize, k_e: ty.k_e as isize, k_o: ty.k_o as isize, l: ty.l as isize }
    }

    fn place(&self, c: &LabelledCycle) -> Option<Budget> {
        let mut b = *self;
        match c {
            LabelledCycle::PosTransposition { .. } | LabelledCycle::NegTransposition { .. } => {
                b.m -= 1
            }
            LabelledCycle::NegOneCycle { label, .. } => {
                if label.rem_euclid(2) == 0 {
                    b.k_e -= 1
                } else {
                    b.k_o -= 1
                }
            }
            LabelledCycle::FixedPoint { .. } => b.l -= 1,
        }
        (b.m >= 0 && b.k_e >= 0 && b.k_o >= 0 && b.l >= 0).then_some(b)
    }
}

impl<'a> NeighborSearch<'a> {
    fn run(&mut self) {
        let k = self.cycles.len();
        let mut solo = Vec::with_capacity(k);
        for c in self.cycles {
            solo.push(self.solo_options(c));
        }
        let mut pairs = vec![Vec::new(); k * k];
        for i in 0..k {
            for j in i + 1..k {
                pairs[i * k + j] = self.pair_options(&self.cycles[i], &self.cycles[j]);
            }
        }
        self.solo_cache = solo;
        self.pair_cache = pairs;
        let mut used = vec![false; self.cycles.len()];
        let budget = Budget::from_type(self.target);
        let mut acc = Vec::with_capacity(self.cycles.len() + 2);
        self.recurse(&mut used, &mut acc, budget);
    }

    fn emit(&mut self, acc: &[LabelledCycle]) {
        let form = LabelledCycleForm::new(self.x.n(), acc.to_vec())
            .expect("assembled cycles partition the points");
        let y = form.to_element();
        if y == *self.x {
            return;
        }
        if class_of(&y, self.descriptor.family()).as_ref() == Ok(self.descriptor) {
            debug_assert_eq!(commutes_oracle(self.x, &y), Ok(true));
            self.out.push(y);
        }
    }

    fn recurse(&mut self, used: &mut Vec<bool>, acc: &mut Vec<LabelledCycle>, budget: Budget) {
        let Some(i) = used.iter().position(|&u| !u) else {
            self.emit(acc);
            return;
        };
        used[i] = true;
        let cycle = &self.cycles[i];
        if self.frozen.contains(&cycle.min_point()) {
            // Frozen cycles are carried over verbatim.
            if let Some(b) = budget.place(cycle) {
                acc.push(*cycle);
                self.recurse(used, acc, b);
                acc.pop();
            }
            used[i] = false;
            return;
        }
        let solo = std::mem::take(&mut self.solo_cache[i]);
        for option in &solo {
            self.try_place(option, used, acc, budget);
        }
        self.solo_cache[i] = solo;
        let k = self.cycles.len();
        for j in i + 1..k {
            if used[j] || self.frozen.contains(&self.cycles[j].min_point()) {
                continue;
            }
            used[j] = true;
            let paired = std::mem::take(&mut self.pair_cache[i * k + j]);
            for option in &paired {
                self.try_place(option, used, acc, budget);
            }
            self.pair_cache[i * k + j] = paired;
            used[j] = false;
        }
        used[i] = false;
    }

    fn try_place(
        &mut self,
        option: &[LabelledCycle],
        used: &mut Vec<bool>,
        acc: &mut Vec<LabelledCycle>,
        budget: Budget,
    ) {
        let mut b = budget;
        for c in option {
            match b.place(c) {
                Some(next) => b = next,
                None => return,
            }
        }
        let start = acc.len();
        acc.extend_from_slice(option);
        self.recurse(used, acc, b);
        acc.truncate(start);
    }

    /// Candidate neighbor cycles covering exactly the points of one cycle of `x`.
    fn solo_options(&self, c: &LabelledCycle) -> Vec<Vec<LabelledCycle>> {
        let w = self.window;
        let mut out = Vec::new();
        match *c {
            LabelledCycle::FixedPoint { point } => {
                out.push(vec![LabelledCycle::FixedPoint { point }]);
                for nu in window_labels(w) {
                    out.push(vec![LabelledCycle::NegOneCycle { point, label: nu }]);
                }
            }
            LabelledCycle::NegOneCycle { point, label } => {
                if in_window(label, w) {
                    out.push(vec![LabelledCycle::NegOneCycle { point, label }]);
                }
                out.push(vec![LabelledCycle::FixedPoint { point }]);
            }
            LabelledCycle::PosTransposition { a, b, label } => {
                if in_window(label, w) {
                    out.push(vec![LabelledCycle::PosTransposition { a, b, label }]);
                }
                for kappa in window_labels(w) {
                    out.push(vec![LabelledCycle::NegTransposition { a, b, label: kappa }]);
                }
                // (+a b)^l splits against (-a)^mu (-b)^nu iff mu - nu = 2l.
                for mu in window_labels(w) {
                    let nu = mu - 2 * label;
                    if in_window(nu, w) {
                        out.push(vec![
                            LabelledCycle::NegOneCycle { point: a, label: mu },
                            LabelledCycle::NegOneCycle { point: b, label: nu },
                        ]);
                    }
                }
                out.push(vec![
                    LabelledCycle::FixedPoint { point: a },
                    LabelledCycle::FixedPoint { point: b },
                ]);
            }
            LabelledCycle::NegTransposition { a, b, label } => {
                if in_window(label, w) {
                    out.push(vec![LabelledCycle::NegTransposition { a, b, label }]);
                }
                for kappa in window_labels(w) {
                    out.push(vec![LabelledCycle::PosTransposition { a, b, label: kappa }]);
                }
                // (-a b)^l splits against (-a)^mu (-b)^nu iff mu + nu = 2l.
                for mu in window_labels(w) {
                    let nu = 2 * label - mu;
                    if in_window(nu, w) {
                        out.push(vec![
                            LabelledCycle::NegOneCycle { point: a, label: mu },
                            LabelledCycle::NegOneCycle { point: b, label: nu },
                        ]);
                    }
                }
                out.push(vec![
                    LabelledCycle::FixedPoint { point: a },
                    LabelledCycle::FixedPoint { point: b },
                ]);
            }
        }
        out
    }

    /// Candidate neighbor cycles jointly covering the points of two cycles of `x`.
    fn pair_options(&self, c1: &LabelledCycle, c2: &LabelledCycle) -> Vec<Vec<LabelledCycle>> {
        let w = self.window;
        let mut out = Vec::new();
        match (*c1, *c2) {
            (
                LabelledCycle::NegOneCycle { point: p1, label: m1 },
                LabelledCycle::NegOneCycle { point: p2, label: m2 },
            ) => {
                if (m1 - m2).rem_euclid(2) == 0 {
                    let (u, wv) = (p1.min(p2), p1.max(p2));
                    let (mu, mw) = if u == p1 { (m1, m2) } else { (m2, m1) };
                    let kappa_pos = (mu - mw) / 2;
                    if in_window(kappa_pos, w) {
                        out.push(vec![LabelledCycle::PosTransposition { a: u, b: wv, label: kappa_pos }]);
                    }
                    let kappa_neg = (mu + mw) / 2;
                    if in_window(kappa_neg, w) {
                        out.push(vec![LabelledCycle::NegTransposition { a: u, b: wv, label: kappa_neg }]);
                    }
                }
            }
            (LabelledCycle::FixedPoint { point: p1 }, LabelledCycle::FixedPoint { point: p2 }) => {
                let (u, wv) = (p1.min(p2), p1.max(p2));
                for kappa in window_labels(w) {
                    out.push(vec![LabelledCycle::PosTransposition { a: u, b: wv, label: kappa }]);
                    out.push(vec![LabelledCycle::NegTransposition { a: u, b: wv, label: kappa }]);
                }
            }
            (t1, t2) if t1.is_transposition() && t2.is_transposition() => {
                let p1 = t1.points();
                let p2 = t2.points();
                let (a, b, c, d) = (p1[0], p1[1], p2[0], p2[1]);
                for (q1, q2) in [((a, c), (b, d)), ((a, d), (b, c))] {
                    for sign1 in [Sign::Plus, Sign::Minus] {
                        for sign2 in [Sign::Plus, Sign::Minus] {
                            for p in window_labels(w) {
                                for q in window_labels(w) {
                                    let y1 = make_trans(q1, sign1, p);
                                    let y2 = make_trans(q2, sign2, q);
                                    if local_pair_commutes((&t1, &t2), (&y1, &y2), &[a, b, c, d]) {
                                        out.push(vec![y1, y2]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
        out
    }
}

fn make_trans((u, v): (usize, usize), sign: Sign, label_at_min: i64) -> LabelledCycle {
    let (a, b) = (u.min(v), u.max(v));
    match sign {
        Sign::Plus => LabelledCycle::PosTransposition { a, b, label: label_at_min },
        Sign::Minus => LabelledCycle::NegTransposition { a, b, label: label_at_min },
    }
}

/// All commuting neighbors of `x` in class `d` whose labels lie in
/// `[-window, window]`, in a deterministic duplicate-free order.
pub fn neighbors_in_class(
    x: &AffineElement,
    d: &ClassDescriptor,
    window: i64,
) -> Result<Vec<AffineElement>> {
    neighbors_in_class_frozen(x, d, window, &BTreeSet::new())
}

/// As [`neighbors_in_class`] but keeping the cycles at `frozen` points (given
/// by their smallest point) exactly as they appear in `x`.
pub fn neighbors_in_class_frozen(
    x: &AffineElement,
    d: &ClassDescriptor,
    window: i64,
    frozen: &BTreeSet<usize>,
) -> Result<Vec<AffineElement>> {
    if class_of(x, d.family())? != *d {
        return Err(Error::ClassMismatch);
    }
    let form = labelled_cycle_form(x)?;
    let mut search = NeighborSearch {
        cycles: &form.cycles,
        frozen,
        window,
        target: d.cycle_type(),
        descriptor: d,
        x,
        solo_cache: Vec::new(),
        pair_cache: Vec::new(),
        out: Vec::new(),
    };
    search.run();
    Ok(search.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{FamilyTag, GroupFamily};
    use crate::text::parse_element;

    fn c_family(n: usize) -> GroupFamily {
        GroupFamily::new(FamilyTag::AffineC, n).unwrap()
    }

    #[test]
    fn element_commutes_with_itself() {
        let x = parse_element("(+1 2)^1 (-3)^2 (-4)^0", 4).unwrap();
        assert_eq!(commutes_oracle(&x, &x).unwrap(), true);
        assert_eq!(commutes_fast(&x, &x).unwrap(), true);
    }

    #[test]
    fn one_cycles_commute_iff_equal_labels() {
        for lambda in -3..=3 {
            for mu in -3..=3 {
                let x = parse_element(&format!("(-1)^{lambda}"), 2).unwrap();
                let y = parse_element(&format!("(-1)^{mu}"), 2).unwrap();
                assert_eq!(commutes_oracle(&x, &y).unwrap(), lambda == mu);
            }
            // A negative 1-cycle commutes with a fixed point on that spot.
            let x = parse_element(&format!("(-1)^{lambda}"), 2).unwrap();
            let y = parse_element("(-2)^0", 2).unwrap();
            assert_eq!(commutes_oracle(&x, &y).unwrap(), true);
        }
    }

    #[test]
    fn opposite_sign_transpositions_always_commute() {
        for lambda in -3..=3 {
            for mu in -3..=3 {
                let x = parse_element(&format!("(+1 2)^{lambda}"), 2).unwrap();
                let y = parse_element(&format!("(-1 2)^{mu}"), 2).unwrap();
                assert_eq!(commutes_oracle(&x, &y).unwrap(), true);
                assert_eq!(commutes_fast(&x, &y).unwrap(), true);
            }
        }
    }

    #[test]
    fn transposition_against_split_one_cycles() {
        // (+a b)^l commutes with (-a)^mu (-b)^nu iff mu - nu = 2l.
        for (lambda, mu, nu, expect) in [(1, 2, 0, true), (1, 0, 0, false), (0, 2, 2, true)] {
            let x = parse_element(&format!("(+1 2)^{lambda}"), 2).unwrap();
            let y = parse_element(&format!("(-1)^{mu} (-2)^{nu}"), 2).unwrap();
            assert_eq!(commutes_oracle(&x, &y).unwrap(), expect, "l={lambda} mu={mu} nu={nu}");
            assert_eq!(commutes_fast(&x, &y).unwrap(), expect);
        }
    }

    #[test]
    fn double_transposition_mixed_case_never_commutes() {
        // g1 = (+ab)(+cd) never commutes with h2 = (+ac)(-bd).
        for l1 in -2..=2 {
            for l2 in -2..=2 {
                for m1 in -2..=2 {
                    for m2 in -2..=2 {
                        let g1 =
                            parse_element(&format!("(+1 2)^{l1} (+3 4)^{l2}"), 4).unwrap();
                        let h2 =
                            parse_element(&format!("(+1 3)^{m1} (-2 4)^{m2}"), 4).unwrap();
                        assert_eq!(commutes_oracle(&g1, &h2).unwrap(), false);
                    }
                }
            }
        }
    }

    #[test]
    fn fast_agrees_with_oracle_on_small_grid() {
        let xs = [
            "(+1 2)^1 (-3)^0 (-4)^2",
            "(-1 2)^0 (-3)^1 (+4)^0",
            "(-1)^2 (-2)^0 (+3 4)^1",
            "(+1 3)^0 (-2 4)^1",
        ];
        for sx in xs {
            for sy in xs {
                let x = parse_element(sx, 4).unwrap();
                let y = parse_element(sy, 4).unwrap();
                assert_eq!(commutes_fast(&x, &y).unwrap(), commutes_oracle(&x, &y).unwrap());
            }
        }
    }

    #[test]
    fn neighbors_preserve_a_lone_even_one_cycle() {
        // In a class with a single even-labelled 1-cycle and no fixed points,
        // every neighbor carries the identical 1-cycle.
        let n = 5;
        let fam = c_family(n);
        let x = parse_element("(+1 2)^0 (-3)^2 (-4)^1 (-5)^1", n).unwrap();
        let d = class_of(&x, fam).unwrap();
        let neighbors = neighbors_in_class(&x, &d, 2).unwrap();
        assert!(!neighbors.is_empty());
        for y in &neighbors {
            let fy = labelled_cycle_form(y).unwrap();
            assert!(
                fy.cycles.contains(&LabelledCycle::NegOneCycle { point: 3, label: 2 }),
                "neighbor lost the conserved 1-cycle: {y:?}"
            );
        }
    }

    #[test]
    fn neighbors_include_flipped_partner_at_window_zero() {
        let n = 4;
        let fam = c_family(n);
        let x = parse_element("(+1 2)^0 (+3 4)^0", n).unwrap();
        let d = class_of(&x, fam).unwrap();
        let neighbors = neighbors_in_class(&x, &d, 0).unwrap();
        let partner = parse_element("(-1 2)^0 (-3 4)^0", n).unwrap();
        assert!(neighbors.contains(&partner));
    }

    #[test]
    fn neighbors_match_brute_force_filter() {
        use crate::enumerate::enumerate_class_window;
        let n = 4;
        let fam = c_family(n);
        let x = parse_element("(+1 2)^1 (-3)^0 (-4)^1", n).unwrap();
        let d = class_of(&x, fam).unwrap();
        let window = 1;
        let mut expected: Vec<AffineElement> = enumerate_class_window(&d, window)
            .unwrap()
            .into_iter()
            .filter(|y| *y != x && commutes_oracle(&x, y).unwrap())
            .collect();
        let mut got = neighbors_in_class(&x, &d, window).unwrap();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }
}
