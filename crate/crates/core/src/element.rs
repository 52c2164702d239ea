//! Signed permutations and affine elements: the exact arithmetic layer.
//!
//! Elements of every classical affine family are stored as a pair `(sigma, v)`
//! where `sigma` is a signed permutation of `{1..n}` and `v` is an integer
//! vector. Group actions are right actions throughout: `w^{st} = (w^s)^t`, and
//! the product rule is `(s,v)(t,u) = (st, v^t + u)`.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Sign of an image point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn unit(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

fn checked_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

/// A permutation of `{1..n}` with a sign per point.
///
/// Entry `i` (0-indexed internally) holds the signed image of point `i+1`:
/// `sigma(e_{i+1}) = sign * e_target`. Points are 1-indexed in the public API.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    /// `image[i] = (t+1) * sign` encodes target `t` (0-based) and the sign.
    image: Vec<i32>,
}

impl SignedPermutation {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            image: (0..n).map(|i| i as i32 + 1).collect(),
        }
    }

    /// Build from 1-indexed `(target, sign)` pairs; entry `i` describes point `i+1`.
    pub fn from_images(images: &[(usize, Sign)]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut image = Vec::with_capacity(n);
        for &(target, sign) in images {
            if target == 0 || target > n {
                return Err(Error::LengthMismatch { expected: n, got: target });
            }
            if seen[target - 1] {
                return Err(Error::Parse {
                    position: 0,
                    message: format!("target {target} repeated; not a bijection"),
                });
            }
            seen[target - 1] = true;
            image.push(target as i32 * sign.unit() as i32);
        }
        Ok(SignedPermutation { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// 0-based target of 0-based point `i`.
    pub fn target(&self, i: usize) -> usize {
        self.image[i].unsigned_abs() as usize - 1
    }

    /// Sign attached to 0-based point `i`.
    pub fn sign(&self, i: usize) -> Sign {
        if self.image[i] < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &c)| c == i as i32 + 1)
    }

    /// Number of minus signs.
    pub fn minus(&self) -> usize {
        self.image.iter().filter(|&&c| c < 0).count()
    }

    /// Right action on an integer vector: `(w^s)[target(i)] = sign(i) * w[i]`.
    pub fn act_on_vector(&self, w: &[i64]) -> Result<Vec<i64>> {
        if w.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: w.len() });
        }
        let mut out = vec![0i64; w.len()];
        for i in 0..w.len() {
            out[self.target(i)] = self.sign(i).unit() * w[i];
        }
        Ok(out)
    }

    /// Group product `self * other`: apply `self` first, then `other`.
    pub fn compose(&self, other: &SignedPermutation) -> Result<SignedPermutation> {
        if self.n() != other.n() {
            return Err(Error::RankMismatch(self.n(), other.n()));
        }
        let image = (0..self.n())
            .map(|i| {
                let t = self.target(i);
                let code = (other.target(t) + 1) as i32;
                if self.sign(i) == other.sign(t) {
                    code
                } else {
                    -code
                }
            })
            .collect();
        Ok(SignedPermutation { image })
    }

    pub fn inverse(&self) -> SignedPermutation {
        let mut image = vec![0i32; self.n()];
        for i in 0..self.n() {
            let t = self.target(i);
            let code = (i + 1) as i32;
            image[t] = if self.sign(i) == Sign::Minus { -code } else { code };
        }
        SignedPermutation { image }
    }

    /// True when the underlying unsigned map has no minus signs at all.
    pub fn is_unsigned(&self) -> bool {
        self.image.iter().all(|&c| c > 0)
    }
}

impl Serialize for SignedPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[i64; 2]> = (0..self.n())
            .map(|i| [(self.target(i) + 1) as i64, self.sign(i).unit()])
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignedPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[i64; 2]> = Vec::deserialize(deserializer)?;
        let images: Vec<(usize, Sign)> = pairs
            .iter()
            .map(|&[t, s]| {
                let sign = match s {
                    1 => Sign::Plus,
                    -1 => Sign::Minus,
                    _ => return Err(D::Error::custom("sign must be 1 or -1")),
                };
                Ok((t as usize, sign))
            })
            .collect::<std::result::Result<_, _>>()?;
        SignedPermutation::from_images(&images).map_err(D::Error::custom)
    }
}

/// An element `(sigma, v)` of the ambient affine group of rank `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineElement {
    pub sigma: SignedPermutation,
    pub v: Vec<i64>,
}

impl AffineElement {
    pub fn new(sigma: SignedPermutation, v: Vec<i64>) -> Result<Self> {
        if v.len() != sigma.n() {
            return Err(Error::LengthMismatch { expected: sigma.n(), got: v.len() });
        }
        Ok(AffineElement { sigma, v })
    }

    pub fn identity(n: usize) -> Self {
        AffineElement {
            sigma: SignedPermutation::identity(n),
            v: vec![0; n],
        }
    }

    /// Pure translation `(1, w)`.
    pub fn translation(w: Vec<i64>) -> Self {
        AffineElement {
            sigma: SignedPermutation::identity(w.len()),
            v: w,
        }
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.is_identity() && self.v.iter().all(|&c| c == 0)
    }

    /// Coordinate sum of `v`.
    pub fn coordinate_sum(&self) -> i64 {
        self.v.iter().sum()
    }

    /// Sum of `|v_i|`.
    pub fn abs_coordinate_sum(&self) -> i64 {
        self.v.iter().map(|c| c.abs()).sum()
    }

    /// Number of minus signs in `sigma`.
    pub fn minus(&self) -> usize {
        self.sigma.minus()
    }

    /// Labelled 1-cycle `(-c)^label` on 1-indexed point `c`, all else fixed.
    pub fn neg_one_cycle(n: usize, c: usize, label: i64) -> Self {
        assert!(c >= 1 && c <= n, "point out of range");
        let mut sigma = SignedPermutation::identity(n);
        sigma.image[c - 1] = -(c as i32);
        let mut v = vec![0; n];
        v[c - 1] = label;
        AffineElement { sigma, v }
    }

    /// Labelled transposition on 1-indexed points `a < b`.
    ///
    /// For `Sign::Plus` this is `(+a b)^label` with `v_a = label`, `v_b = -label`;
    /// for `Sign::Minus` it is `(-a b)^label` with `v_a = v_b = label`.
    pub fn transposition(n: usize, a: usize, b: usize, sign: Sign, label: i64) -> Self {
        assert!(a >= 1 && b >= 1 && a <= n && b <= n && a != b, "bad transposition");
        let mut sigma = SignedPermutation::identity(n);
        let code_b = b as i32 * sign.unit() as i32;
        let code_a = a as i32 * sign.unit() as i32;
        sigma.image[a - 1] = code_b;
        sigma.image[b - 1] = code_a;
        let mut v = vec![0; n];
        v[a - 1] = label;
        v[b - 1] = match sign {
            Sign::Plus => -label,
            Sign::Minus => label,
        };
        AffineElement { sigma, v }
    }

    /// `self * other` under `(s,v)(t,u) = (st, v^t + u)`.
    pub fn multiply(&self, other: &AffineElement) -> Result<AffineElement> {
        if self.n() != other.n() {
            return Err(Error::RankMismatch(self.n(), other.n()));
        }
        let sigma = self.sigma.compose(&other.sigma)?;
        let mut v = other.sigma.act_on_vector(&self.v)?;
        for (c, u) in v.iter_mut().zip(other.v.iter()) {
            *c = checked_add(*c, *u)?;
        }
        Ok(AffineElement { sigma, v })
    }

    /// `(s,v)^{-1} = (s^{-1}, -v^{s^{-1}})`.
    pub fn inverse(&self) -> AffineElement {
        let sigma_inv = self.sigma.inverse();
        let mut v = sigma_inv
            .act_on_vector(&self.v)
            .expect("lengths agree by construction");
        for c in v.iter_mut() {
            *c = -*c;
        }
        AffineElement { sigma: sigma_inv, v }
    }

    /// Conjugation `self^{g} = g^{-1} self g` by the closed form
    /// `(g^{-1} s g, v^g + w - w^{g^{-1} s g})`.
    pub fn conjugate_by(&self, g: &AffineElement) -> Result<AffineElement> {
        if self.n() != g.n() {
            return Err(Error::RankMismatch(self.n(), g.n()));
        }
        let g_inv_sigma = g.sigma.inverse();
        let sigma = g_inv_sigma.compose(&self.sigma)?.compose(&g.sigma)?;
        let v_g = g.sigma.act_on_vector(&self.v)?;
        let w_twisted = sigma.act_on_vector(&g.v)?;
        let mut v = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            v.push(checked_add(checked_add(v_g[i], g.v[i])?, -w_twisted[i])?);
        }
        Ok(AffineElement { sigma, v })
    }
}

/// The five classical affine families. `rank` is the number `n` of points
/// acted on, so `AffineA` of rank `n` is the group usually written with
/// subscript `n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyTag {
    AffineA,
    AffineB,
    AffineBbar,
    AffineC,
    AffineD,
}

impl FamilyTag {
    pub fn short_name(self) -> &'static str {
        match self {
            FamilyTag::AffineA => "A",
            FamilyTag::AffineB => "B",
            FamilyTag::AffineBbar => "Bbar",
            FamilyTag::AffineC => "C",
            FamilyTag::AffineD => "D",
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            FamilyTag::AffineA | FamilyTag::AffineC => 2,
            FamilyTag::AffineB | FamilyTag::AffineBbar => 3,
            FamilyTag::AffineD => 4,
        }
    }
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// A family tag together with a validated rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupFamily {
    tag: FamilyTag,
    rank: usize,
}

impl GroupFamily {
    pub fn new(tag: FamilyTag, rank: usize) -> Result<Self> {
        if rank < tag.min_rank() {
            return Err(Error::InvalidRank {
                family: tag.short_name().to_string(),
                rank,
            });
        }
        Ok(GroupFamily { tag, rank })
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Membership test for `x` in this family, per the coordinate criteria.
    ///
    /// The ambient family `C` accepts everything; `B` requires an even
    /// coordinate sum; `Bbar` requires the coordinate sum to agree with the
    /// number of minus signs mod 2; `D` is the intersection of the two; `A`
    /// requires an unsigned permutation and coordinate sum zero.
    pub fn contains(&self, x: &AffineElement) -> bool {
        assert_eq!(x.n(), self.rank, "rank mismatch in membership test");
        let sum = x.coordinate_sum();
        match self.tag {
            FamilyTag::AffineC => true,
            FamilyTag::AffineB => sum % 2 == 0,
            FamilyTag::AffineBbar => (sum - x.minus() as i64) % 2 == 0,
            FamilyTag::AffineD => sum % 2 == 0 && (sum - x.minus() as i64) % 2 == 0,
            FamilyTag::AffineA => x.sigma.is_unsigned() && sum == 0,
        }
    }

    /// The generating set of simple reflections.
    pub fn generators(&self) -> Vec<AffineElement> {
        let n = self.rank;
        let r1 = AffineElement::neg_one_cycle(n, 1, 0);
        let r = |i: usize| AffineElement::transposition(n, i - 1, i, Sign::Plus, 0);
        let r_last = AffineElement::neg_one_cycle(n, n, 1);
        let s = AffineElement::transposition(n, n - 1, n, Sign::Minus, 1);
        let t = AffineElement::transposition(n, 1, 2, Sign::Minus, 1);
        match self.tag {
            FamilyTag::AffineC => {
                let mut gens = vec![r1];
                gens.extend((2..=n).map(r));
                gens.push(r_last);
                gens
            }
            FamilyTag::AffineB => {
                let mut gens = vec![r1];
                gens.extend((2..=n).map(r));
                gens.push(s);
                gens
            }
            FamilyTag::AffineBbar => {
                let mut gens = vec![t];
                gens.extend((2..=n).map(r));
                gens.push(r_last);
                gens
            }
            FamilyTag::AffineD => {
                let mut gens = vec![t];
                gens.extend((2..=n).map(r));
                gens.push(s);
                gens
            }
            FamilyTag::AffineA => (2..=n).map(r).collect(),
        }
    }
}

impl std::fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}~{}", self.tag.short_name(), self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[(usize, Sign)]) -> SignedPermutation {
        SignedPermutation::from_images(images).unwrap()
    }

    /// The cycle (-1 +2 -3): 1 -> -2, 2 -> 3, 3 -> -1.
    fn paper_three_cycle() -> SignedPermutation {
        perm(&[(2, Sign::Minus), (3, Sign::Plus), (1, Sign::Minus)])
    }

    #[test]
    fn action_matches_worked_example() {
        let w = paper_three_cycle();
        assert_eq!(w.act_on_vector(&[1, 0, 0]).unwrap(), vec![0, -1, 0]);
        assert_eq!(w.act_on_vector(&[0, 1, 0]).unwrap(), vec![0, 0, 1]);
        assert_eq!(w.act_on_vector(&[0, 0, 1]).unwrap(), vec![-1, 0, 0]);
    }

    #[test]
    fn identity_action_is_trivial() {
        let id = SignedPermutation::identity(4);
        assert_eq!(id.act_on_vector(&[3, -1, 0, 7]).unwrap(), vec![3, -1, 0, 7]);
    }

    #[test]
    fn action_composes_on_the_right() {
        let s = paper_three_cycle();
        let t = perm(&[(1, Sign::Minus), (3, Sign::Plus), (2, Sign::Plus)]);
        let st = s.compose(&t).unwrap();
        let w = vec![5, -2, 9];
        let via_product = st.act_on_vector(&w).unwrap();
        let stepwise = t.act_on_vector(&s.act_on_vector(&w).unwrap()).unwrap();
        assert_eq!(via_product, stepwise);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let s = paper_three_cycle();
        assert!(s.compose(&s.inverse()).unwrap().is_identity());
        assert!(s.inverse().compose(&s).unwrap().is_identity());
    }

    #[test]
    fn multiply_identity() {
        let id = AffineElement::identity(3);
        assert_eq!(id.multiply(&id).unwrap(), id);
    }

    #[test]
    fn inverse_roundtrip() {
        let x = AffineElement::new(paper_three_cycle(), vec![4, 5, 6]).unwrap();
        let prod = x.multiply(&x.inverse()).unwrap();
        assert!(prod.is_identity());
        let prod = x.inverse().multiply(&x).unwrap();
        assert!(prod.is_identity());
    }

    #[test]
    fn conjugate_matches_triple_product() {
        let x = AffineElement::new(paper_three_cycle(), vec![1, -2, 3]).unwrap();
        let g = AffineElement::new(
            perm(&[(3, Sign::Minus), (1, Sign::Plus), (2, Sign::Minus)]),
            vec![-1, 0, 2],
        )
        .unwrap();
        let closed = x.conjugate_by(&g).unwrap();
        let triple = g.inverse().multiply(&x).unwrap().multiply(&g).unwrap();
        assert_eq!(closed, triple);
    }

    #[test]
    fn conjugate_by_identity_is_trivial() {
        let x = AffineElement::new(paper_three_cycle(), vec![1, -2, 3]).unwrap();
        assert_eq!(x.conjugate_by(&AffineElement::identity(3)).unwrap(), x);
        let id = AffineElement::identity(3);
        assert!(id.conjugate_by(&x).unwrap().is_identity());
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let x = AffineElement::identity(3);
        let y = AffineElement::identity(4);
        assert!(matches!(x.multiply(&y), Err(Error::RankMismatch(3, 4))));
    }

    #[test]
    fn generator_counts_and_membership() {
        for tag in [
            FamilyTag::AffineA,
            FamilyTag::AffineB,
            FamilyTag::AffineBbar,
            FamilyTag::AffineC,
            FamilyTag::AffineD,
        ] {
            let n = tag.min_rank().max(4);
            let fam = GroupFamily::new(tag, n).unwrap();
            let gens = fam.generators();
            let expected = if tag == FamilyTag::AffineA { n - 1 } else { n + 1 };
            assert_eq!(gens.len(), expected, "{fam}");
            for g in &gens {
                assert!(fam.contains(g), "{fam} generator not a member: {g:?}");
                assert!(g.multiply(g).unwrap().is_identity(), "generator not an involution");
            }
        }
    }

    #[test]
    fn b_family_excludes_odd_sum() {
        let n = 4;
        let b = GroupFamily::new(FamilyTag::AffineB, n).unwrap();
        let bbar = GroupFamily::new(FamilyTag::AffineBbar, n).unwrap();
        // s = (-(n-1) n)^1 has coordinate sum 2: in B (and, with two minus
        // signs, in Bbar as well -- it generates the D family).
        let s = AffineElement::transposition(n, n - 1, n, Sign::Minus, 1);
        assert!(b.contains(&s));
        assert!(bbar.contains(&s));
        // r_{n+1} = (-n)^1 has coordinate sum 1: not in B, but in Bbar.
        let r_last = AffineElement::neg_one_cycle(n, n, 1);
        assert!(!b.contains(&r_last));
        assert!(bbar.contains(&r_last));
        // r_1 = (-1)^0 has even sum but one minus sign: in B, not in Bbar.
        let r1 = AffineElement::neg_one_cycle(n, 1, 0);
        assert!(b.contains(&r1));
        assert!(!bbar.contains(&r1));
    }

    #[test]
    fn d_membership_is_intersection() {
        let n = 4;
        let b = GroupFamily::new(FamilyTag::AffineB, n).unwrap();
        let bbar = GroupFamily::new(FamilyTag::AffineBbar, n).unwrap();
        let d = GroupFamily::new(FamilyTag::AffineD, n).unwrap();
        let candidates = [
            AffineElement::neg_one_cycle(n, 2, 0),
            AffineElement::neg_one_cycle(n, 2, 1),
            AffineElement::transposition(n, 1, 3, Sign::Minus, 2),
            AffineElement::translation(vec![1, 1, 0, 0]),
            AffineElement::translation(vec![1, 0, 0, 0]),
        ];
        for x in &candidates {
            assert_eq!(d.contains(x), b.contains(x) && bbar.contains(x));
        }
    }

    #[test]
    fn rank_constraints_enforced() {
        assert!(GroupFamily::new(FamilyTag::AffineD, 3).is_err());
        assert!(GroupFamily::new(FamilyTag::AffineB, 2).is_err());
        assert!(GroupFamily::new(FamilyTag::AffineC, 2).is_ok());
    }
}
