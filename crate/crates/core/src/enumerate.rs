//! Exhaustive enumeration of class members inside a label window, the
//! matching closed-form count, and enumeration of finite involution classes.

use crate::conjugacy::{class_of, ClassDescriptor, FiniteClassDescriptor, FiniteFamily};
use crate::element::{AffineElement, Sign, SignedPermutation};
use crate::error::Result;
use crate::involution::{LabelledCycle, LabelledCycleForm};

/// Even labels available in `[-w, w]`.
fn even_labels(w: i64) -> Vec<i64> {
    (-w..=w).filter(|l| l.rem_euclid(2) == 0).collect()
}

/// Odd labels available in `[-w, w]`.
fn odd_labels(w: i64) -> Vec<i64> {
    (-w..=w).filter(|l| l.rem_euclid(2) == 1).collect()
}

struct WindowEnum<'a> {
    d: &'a ClassDescriptor,
    window: i64,
    out: Vec<AffineElement>,
}

impl<'a> WindowEnum<'a> {
    fn recurse(
        &mut self,
        next: usize,
        free: &mut Vec<usize>,
        budget: (usize, usize, usize, usize),
        acc: &mut Vec<LabelledCycle>,
    ) {
        let n = self.d.n();
        if acc.iter().map(|c| c.points().len()).sum::<usize>() == n {
            let y = LabelledCycleForm::new(n, acc.clone())
                .expect("cycles partition the points")
                .to_element();
            if class_of(&y, self.d.family()).as_ref() == Ok(self.d) {
                self.out.push(y);
            }
            return;
        }
        let p = free[next];
        let (m, k_e, k_o, l) = budget;
        if l > 0 {
            acc.push(LabelledCycle::FixedPoint { point: p });
            self.recurse(next + 1, free, (m, k_e, k_o, l - 1), acc);
            acc.pop();
        }
        if k_e > 0 {
            for mu in even_labels(self.window) {
                acc.push(LabelledCycle::NegOneCycle { point: p, label: mu });
                self.recurse(next + 1, free, (m, k_e - 1, k_o, l), acc);
                acc.pop();
            }
        }
        if k_o > 0 {
            for mu in odd_labels(self.window) {
                acc.push(LabelledCycle::NegOneCycle { point: p, label: mu });
                self.recurse(next + 1, free, (m, k_e, k_o - 1, l), acc);
                acc.pop();
            }
        }
        if m > 0 {
            // Pair p with any later free point; remove that point from the
            // free list for the recursive call.
            for idx in next + 1..free.len() {
                let q = free[idx];
                free.remove(idx);
                for sign in [Sign::Plus, Sign::Minus] {
                    for lambda in -self.window..=self.window {
                        acc.push(match sign {
                            Sign::Plus => LabelledCycle::PosTransposition { a: p, b: q, label: lambda },
                            Sign::Minus => LabelledCycle::NegTransposition { a: p, b: q, label: lambda },
                        });
                        self.recurse(next + 1, free, (m - 1, k_e, k_o, l), acc);
                        acc.pop();
                    }
                }
                free.insert(idx, q);
            }
        }
    }
}

/// All members of class `d` whose labels lie in `[-window, window]`, in a
/// deterministic order.
pub fn enumerate_class_window(d: &ClassDescriptor, window: i64) -> Result<Vec<AffineElement>> {
    let ty = d.cycle_type();
    let mut free: Vec<usize> = (1..=d.n()).collect();
    let mut w = WindowEnum { d, window, out: Vec::new() };
    let mut acc = Vec::new();
    w.recurse(0, &mut free, (ty.m, ty.k_e, ty.k_o, ty.l), &mut acc);
    Ok(w.out)
}

/// Closed-form count of the window members of `d`, via a multinomial for the
/// point structure and a residue DP over the label choices. Used as an
/// independent oracle for the enumeration.
pub fn count_class_window(d: &ClassDescriptor, window: i64) -> u128 {
    use crate::conjugacy::SplitInvariant;
    let ty = d.cycle_type();
    let n = d.n() as u128;
    // Number of ways to choose the point structure: pick the transposition
    // pairs, then the even 1-cycle points, odd 1-cycle points, fixed points.
    let mut structures: u128 = 1;
    let mut remaining = n;
    for _ in 0..ty.m {
        structures *= remaining * (remaining - 1) / 2;
        remaining -= 2;
    }
    structures /= (1..=ty.m as u128).product::<u128>();
    let choose = |n: u128, k: u128| -> u128 {
        let mut r = 1u128;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    };
    structures *= choose(remaining, ty.k_e as u128);
    remaining -= ty.k_e as u128;
    structures *= choose(remaining, ty.k_o as u128);

    // Label choices, tracked modulo the residues the split needs. The DP state
    // is (f mod 4, minus mod 4, sum_pos_labels mod 2).
    let evens = even_labels(window);
    let odds = odd_labels(window);
    let all = (-window..=window).collect::<Vec<_>>();
    let mut dp = std::collections::HashMap::new();
    dp.insert((0i64, 0i64, 0i64), 1u128);
    let step = |dp: &std::collections::HashMap<(i64, i64, i64), u128>,
                    choices: &[(i64, i64, i64)]| {
        let mut next = std::collections::HashMap::new();
        for (&(f, mi, s), &count) in dp {
            for &(df, dmi, ds) in choices {
                let key = ((f + df).rem_euclid(4), (mi + dmi).rem_euclid(4), (s + ds).rem_euclid(2));
                *next.entry(key).or_insert(0u128) += count;
            }
        }
        next
    };
    for _ in 0..ty.m {
        // A transposition contributes 2*label to f; sign Minus adds 2 minus
        // signs; sign Plus adds the label to the positive-label sum.
        let choices: Vec<(i64, i64, i64)> = all
            .iter()
            .flat_map(|&lam| {
                [(2 * lam, 0, lam), (2 * lam, 2, 0)] // (Plus, Minus)
            })
            .collect();
        dp = step(&dp, &choices);
    }
    for _ in 0..ty.k_e {
        let choices: Vec<(i64, i64, i64)> = evens.iter().map(|&mu| (mu, 1, 0)).collect();
        dp = step(&dp, &choices);
    }
    for _ in 0..ty.k_o {
        let choices: Vec<(i64, i64, i64)> = odds.iter().map(|&mu| (mu, 1, 0)).collect();
        dp = step(&dp, &choices);
    }
    let label_count: u128 = dp
        .iter()
        .filter(|(&(f, mi, s), _)| match d.split() {
            None => true,
            Some(SplitInvariant::FMod4 { f_mod4 }) => f == f_mod4 as i64,
            Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4 }) => {
                (f + mi).rem_euclid(4) == f_plus_minus_mod4 as i64
            }
            Some(SplitInvariant::MinusAndFMod4 { minus_mod4, f_mod4 }) => {
                mi == minus_mod4 as i64 && f == f_mod4 as i64
            }
            Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2 }) => {
                s == sum_labels_mod2 as i64
            }
        })
        .map(|(_, &c)| c)
        .sum();
    structures * label_count
}

/// All involutions of the given finite class.
pub fn enumerate_finite_class(d: &FiniteClassDescriptor) -> Vec<SignedPermutation> {
    fn recurse(
        n: usize,
        family: FiniteFamily,
        free: &mut Vec<usize>,
        budget: (usize, usize, usize),
        acc: &mut Vec<LabelledCycle>,
        out: &mut Vec<SignedPermutation>,
        minus_mod4: Option<u8>,
    ) {
        if free.is_empty() {
            let form = LabelledCycleForm::new(n, acc.clone()).expect("partition");
            let sigma = form.to_element().sigma;
            if let Some(r) = minus_mod4 {
                if sigma.minus() % 4 != r as usize {
                    return;
                }
            }
            out.push(sigma);
            return;
        }
        let p = free[0];
        let (m, k, l) = budget;
        if l > 0 {
            free.remove(0);
            acc.push(LabelledCycle::FixedPoint { point: p });
            recurse(n, family, free, (m, k, l - 1), acc, out, minus_mod4);
            acc.pop();
            free.insert(0, p);
        }
        if k > 0 {
            free.remove(0);
            acc.push(LabelledCycle::NegOneCycle { point: p, label: 0 });
            recurse(n, family, free, (m, k - 1, l), acc, out, minus_mod4);
            acc.pop();
            free.insert(0, p);
        }
        if m > 0 {
            for idx in 1..free.len() {
                let q = free[idx];
                free.remove(idx);
                free.remove(0);
                let signs: &[Sign] = if family == FiniteFamily::FiniteA {
                    &[Sign::Plus]
                } else {
                    &[Sign::Plus, Sign::Minus]
                };
                for &sign in signs {
                    acc.push(match sign {
                        Sign::Plus => LabelledCycle::PosTransposition { a: p, b: q, label: 0 },
                        Sign::Minus => LabelledCycle::NegTransposition { a: p, b: q, label: 0 },
                    });
                    recurse(n, family, free, (m - 1, k, l), acc, out, minus_mod4);
                    acc.pop();
                }
                free.insert(0, p);
                free.insert(idx, q);
            }
        }
    }

    let mut out = Vec::new();
    let mut free: Vec<usize> = (1..=d.n).collect();
    let mut acc = Vec::new();
    recurse(
        d.n,
        d.family,
        &mut free,
        (d.m, d.k, d.l),
        &mut acc,
        &mut out,
        d.minus_mod4,
    );
    // In FiniteD without the 4-split, keep only even-minus elements.
    if d.family == FiniteFamily::FiniteD {
        out.retain(|s| s.minus() % 2 == 0);
    }
    out
}

/// A uniformly structured random involution with labels in `[-bound, bound]`:
/// random transposition pairs, signs and labels, random negative 1-cycles,
/// the rest fixed.
pub fn random_involution<R: rand::Rng>(n: usize, bound: i64, rng: &mut R) -> AffineElement {
    use rand::seq::SliceRandom;
    loop {
        let mut points: Vec<usize> = (1..=n).collect();
        points.shuffle(rng);
        let m = rng.gen_range(0..=n / 2);
        let mut cycles = Vec::new();
        let mut it = points.into_iter();
        for _ in 0..m {
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
            let label = rng.gen_range(-bound..=bound);
            cycles.push(match sign {
                Sign::Plus => LabelledCycle::PosTransposition { a: a.min(b), b: a.max(b), label },
                Sign::Minus => LabelledCycle::NegTransposition { a: a.min(b), b: a.max(b), label },
            });
        }
        for p in it {
            if rng.gen() {
                cycles.push(LabelledCycle::NegOneCycle {
                    point: p,
                    label: rng.gen_range(-bound..=bound),
                });
            } else {
                cycles.push(LabelledCycle::FixedPoint { point: p });
            }
        }
        let x = LabelledCycleForm::new(n, cycles).unwrap().to_element();
        if !x.is_identity() {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::enumerate_descriptors;
    use crate::element::{FamilyTag, GroupFamily};

    #[test]
    fn window_counts_match_closed_form() {
        for tag in [FamilyTag::AffineC, FamilyTag::AffineB, FamilyTag::AffineD] {
            let n = tag.min_rank().max(4);
            let family = GroupFamily::new(tag, n).unwrap();
            for d in enumerate_descriptors(family) {
                for window in 0..=1 {
                    let listed = enumerate_class_window(&d, window).unwrap().len() as u128;
                    let counted = count_class_window(&d, window);
                    assert_eq!(listed, counted, "{d} at window {window}");
                }
            }
        }
    }

    #[test]
    fn window_members_really_are_members() {
        let family = GroupFamily::new(FamilyTag::AffineB, 4).unwrap();
        for d in enumerate_descriptors(family) {
            for y in enumerate_class_window(&d, 1).unwrap() {
                assert_eq!(class_of(&y, family).unwrap(), d);
            }
        }
    }

    #[test]
    fn finite_class_sizes() {
        // Type (1,2,2) in B_5 wait n=5: 2m+k+l = 2+2+1: use (1,2,0) in B_4:
        // C(4,2)*2 signs * C(2,2) = 12 elements.
        let d = FiniteClassDescriptor {
            family: FiniteFamily::FiniteB,
            n: 4,
            m: 1,
            k: 2,
            l: 0,
            minus_mod4: None,
        };
        assert_eq!(enumerate_finite_class(&d).len(), 12);
        // The split (2,0,0) classes in D_4 have 3 pairings * 2 sign patterns
        // each = 6 elements per residue.
        for r in [0u8, 2] {
            let d = FiniteClassDescriptor {
                family: FiniteFamily::FiniteD,
                n: 4,
                m: 2,
                k: 0,
                l: 0,
                minus_mod4: Some(r),
            };
            assert_eq!(enumerate_finite_class(&d).len(), 6);
        }
    }
}
