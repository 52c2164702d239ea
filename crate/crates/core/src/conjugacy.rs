//! Conjugacy classification of involutions in the affine families and their
//! finite counterparts: class descriptors, canonical representatives and
//! explicit conjugator construction.

use crate::element::{AffineElement, FamilyTag, GroupFamily, Sign, SignedPermutation};
use crate::error::{Error, Result};
use crate::involution::{
    f_of_form, labelled_cycle_form, LabelledCycle, LabelledCycleForm, LabelledCycleType,
};
use serde::{Deserialize, Serialize};

fn mod4(x: i64) -> u8 {
    x.rem_euclid(4) as u8
}

fn mod2(x: i64) -> u8 {
    x.rem_euclid(2) as u8
}

/// Residue data distinguishing classes that share a labelled cycle type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitInvariant {
    /// `minus mod 4` and `f mod 4`, the four-way split.
    MinusAndFMod4 { minus_mod4: u8, f_mod4: u8 },
    /// `f mod 4`.
    FMod4 { f_mod4: u8 },
    /// `(f + minus) mod 4`.
    FPlusMinusMod4 { f_plus_minus_mod4: u8 },
    /// Sum of transposition labels mod 2 (type `A`, no fixed points).
    SumLabelsMod2 { sum_labels_mod2: u8 },
}

/// Which residue a (family, type) pair uses to split, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    FMod4,
    FPlusMinusMod4,
    MinusAndFMod4,
    SumLabelsMod2,
}

/// Residue kind used by the given family on the given type.
///
/// `B` splits exactly the types with `k_o = l = 0` by `f mod 4`, `Bbar` the
/// types with `k_e = l = 0` by `(f + minus) mod 4`, and `A` (whose involutions
/// have no negative cycles) the fixed-point-free types by the label-sum
/// parity. In `D` the classes of a type with `l = 0` coincide with the
/// classes of `B` (when `k_o = 0`), of `Bbar` (when `k_e = 0`), or with the
/// four-way refinement by `(minus, f) mod 4` when the type is `(m,0,0,0)`.
pub fn split_kind(tag: FamilyTag, ty: LabelledCycleType) -> Option<SplitKind> {
    match tag {
        FamilyTag::AffineC => None,
        FamilyTag::AffineA => (ty.l == 0).then_some(SplitKind::SumLabelsMod2),
        FamilyTag::AffineB => (ty.k_o == 0 && ty.l == 0).then_some(SplitKind::FMod4),
        FamilyTag::AffineBbar => (ty.k_e == 0 && ty.l == 0).then_some(SplitKind::FPlusMinusMod4),
        FamilyTag::AffineD => {
            if ty.l != 0 {
                None
            } else if ty.k_e == 0 && ty.k_o == 0 {
                Some(SplitKind::MinusAndFMod4)
            } else if ty.k_o == 0 {
                Some(SplitKind::FMod4)
            } else if ty.k_e == 0 {
                Some(SplitKind::FPlusMinusMod4)
            } else {
                None
            }
        }
    }
}

/// Parity constraints a type must satisfy to contain involutions of the family.
fn type_allowed(tag: FamilyTag, ty: LabelledCycleType) -> bool {
    if ty.m == 0 && ty.k_e == 0 && ty.k_o == 0 {
        return false; // identity
    }
    match tag {
        FamilyTag::AffineC => true,
        FamilyTag::AffineB => ty.k_o % 2 == 0,
        FamilyTag::AffineBbar => ty.k_e % 2 == 0,
        FamilyTag::AffineD => ty.k_e % 2 == 0 && ty.k_o % 2 == 0,
        FamilyTag::AffineA => ty.k_e == 0 && ty.k_o == 0,
    }
}

/// The canonical name of an involution conjugacy class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassDescriptor {
    family: GroupFamily,
    cycle_type: LabelledCycleType,
    split: Option<SplitInvariant>,
}

impl ClassDescriptor {
    /// Validate realizability: rank arithmetic, family parity rules and the
    /// split data expected for this (family, type) pair.
    pub fn new(
        family: GroupFamily,
        cycle_type: LabelledCycleType,
        split: Option<SplitInvariant>,
    ) -> Result<Self> {
        if cycle_type.rank() != family.rank() {
            return Err(Error::Unrealizable(format!(
                "type {cycle_type} has rank {} but family {family} has rank {}",
                cycle_type.rank(),
                family.rank()
            )));
        }
        if !type_allowed(family.tag(), cycle_type) {
            return Err(Error::Unrealizable(format!(
                "type {cycle_type} carries no involutions of {family}"
            )));
        }
        let kind = split_kind(family.tag(), cycle_type);
        let ok = match (kind, split) {
            (None, None) => true,
            (Some(SplitKind::FMod4), Some(SplitInvariant::FMod4 { f_mod4 })) => {
                f_mod4 == 0 || f_mod4 == 2
            }
            (
                Some(SplitKind::FPlusMinusMod4),
                Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4 }),
            ) => f_plus_minus_mod4 == 0 || f_plus_minus_mod4 == 2,
            (
                Some(SplitKind::MinusAndFMod4),
                Some(SplitInvariant::MinusAndFMod4 { minus_mod4, f_mod4 }),
            ) => (minus_mod4 == 0 || minus_mod4 == 2) && (f_mod4 == 0 || f_mod4 == 2),
            (Some(SplitKind::SumLabelsMod2), Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2 })) => {
                sum_labels_mod2 <= 1
            }
            _ => false,
        };
        if !ok {
            return Err(Error::Unrealizable(format!(
                "split data {split:?} does not fit type {cycle_type} in {family}"
            )));
        }
        Ok(ClassDescriptor { family, cycle_type, split })
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn cycle_type(&self) -> LabelledCycleType {
        self.cycle_type
    }

    pub fn split(&self) -> Option<SplitInvariant> {
        self.split
    }

    pub fn n(&self) -> usize {
        self.family.rank()
    }

    /// Compact text form, e.g. `B:n=6:(2,2,0,0):f=0`.
    pub fn to_compact_text(&self) -> String {
        let mut s = format!(
            "{}:n={}:{}",
            self.family.tag().short_name(),
            self.family.rank(),
            self.cycle_type
        );
        match self.split {
            None => {}
            Some(SplitInvariant::FMod4 { f_mod4 }) => s.push_str(&format!(":f={f_mod4}")),
            Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4 }) => {
                s.push_str(&format!(":fm={f_plus_minus_mod4}"))
            }
            Some(SplitInvariant::MinusAndFMod4 { minus_mod4, f_mod4 }) => {
                s.push_str(&format!(":minus={minus_mod4},f={f_mod4}"))
            }
            Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2 }) => {
                s.push_str(&format!(":s={sum_labels_mod2}"))
            }
        }
        s
    }

    /// Parse the compact text form.
    pub fn from_compact_text(text: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse { position: 0, message: m.to_string() };
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 3 {
            return Err(err("expected FAMILY:n=N:(m,ke,ko,l)[:split]"));
        }
        let tag = match parts[0] {
            "A" => FamilyTag::AffineA,
            "B" => FamilyTag::AffineB,
            "Bbar" => FamilyTag::AffineBbar,
            "C" => FamilyTag::AffineC,
            "D" => FamilyTag::AffineD,
            other => return Err(err(&format!("unknown family {other:?}"))),
        };
        let n: usize = parts[1]
            .strip_prefix("n=")
            .ok_or_else(|| err("expected n=N"))?
            .parse()
            .map_err(|_| err("bad rank"))?;
        let ty_text = parts[2]
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| err("expected (m,ke,ko,l)"))?;
        let nums: Vec<usize> = ty_text
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| err("bad type entry")))
            .collect::<Result<_>>()?;
        if nums.len() != 4 {
            return Err(err("type needs four entries"));
        }
        let cycle_type = LabelledCycleType::new(nums[0], nums[1], nums[2], nums[3]);
        let split = if parts.len() > 3 {
            let spec = parts[3..].join(":");
            Some(parse_split(&spec).ok_or_else(|| err(&format!("bad split {spec:?}")))?)
        } else {
            None
        };
        ClassDescriptor::new(GroupFamily::new(tag, n)?, cycle_type, split)
    }
}

fn parse_split(spec: &str) -> Option<SplitInvariant> {
    if let Some(rest) = spec.strip_prefix("minus=") {
        let (a, b) = rest.split_once(",f=")?;
        return Some(SplitInvariant::MinusAndFMod4 {
            minus_mod4: a.parse().ok()?,
            f_mod4: b.parse().ok()?,
        });
    }
    if let Some(r) = spec.strip_prefix("fm=") {
        return Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4: r.parse().ok()? });
    }
    if let Some(r) = spec.strip_prefix("f=") {
        return Some(SplitInvariant::FMod4 { f_mod4: r.parse().ok()? });
    }
    if let Some(r) = spec.strip_prefix("s=") {
        return Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2: r.parse().ok()? });
    }
    None
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    family: FamilyTag,
    n: usize,
    #[serde(rename = "type")]
    cycle_type: [usize; 4],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    split: Option<SplitInvariant>,
}

impl Serialize for ClassDescriptor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let ty = self.cycle_type;
        DescriptorJson {
            family: self.family.tag(),
            n: self.family.rank(),
            cycle_type: [ty.m, ty.k_e, ty.k_o, ty.l],
            split: self.split,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClassDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DescriptorJson::deserialize(deserializer)?;
        let [m, k_e, k_o, l] = raw.cycle_type;
        let family = GroupFamily::new(raw.family, raw.n).map_err(D::Error::custom)?;
        ClassDescriptor::new(family, LabelledCycleType::new(m, k_e, k_o, l), raw.split)
            .map_err(D::Error::custom)
    }
}

impl std::fmt::Display for ClassDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_compact_text())
    }
}

/// Residues of a concrete involution, for split computation.
fn residues_of(form: &LabelledCycleForm, x: &AffineElement, kind: SplitKind) -> SplitInvariant {
    let f = f_of_form(form);
    match kind {
        SplitKind::FMod4 => SplitInvariant::FMod4 { f_mod4: mod4(f) },
        SplitKind::FPlusMinusMod4 => SplitInvariant::FPlusMinusMod4 {
            f_plus_minus_mod4: mod4(f + x.minus() as i64),
        },
        SplitKind::MinusAndFMod4 => SplitInvariant::MinusAndFMod4 {
            minus_mod4: mod4(x.minus() as i64),
            f_mod4: mod4(f),
        },
        SplitKind::SumLabelsMod2 => {
            let sum: i64 = form
                .cycles
                .iter()
                .map(|c| match *c {
                    LabelledCycle::PosTransposition { label, .. } => label,
                    _ => 0,
                })
                .sum();
            SplitInvariant::SumLabelsMod2 { sum_labels_mod2: mod2(sum) }
        }
    }
}

/// The conjugacy class of the involution `x` inside `family`.
pub fn class_of(x: &AffineElement, family: GroupFamily) -> Result<ClassDescriptor> {
    let form = labelled_cycle_form(x)?;
    if !family.contains(x) {
        return Err(Error::NotAMember(family.to_string()));
    }
    let ty = form.cycle_type();
    let split = split_kind(family.tag(), ty).map(|kind| residues_of(&form, x, kind));
    ClassDescriptor::new(family, ty, split)
}

/// The canonical representative of a class: transpositions on `(1 2), (3 4),
/// ...` then even-labelled negative 1-cycles (label 0), odd-labelled ones
/// (label 1), then fixed points, with the leading cycles adjusted to hit the
/// split residues.
pub fn canonical_representative(d: &ClassDescriptor) -> AffineElement {
    let ty = d.cycle_type();
    let n = d.n();
    let mut cycles: Vec<LabelledCycle> = Vec::new();
    for i in 0..ty.m {
        cycles.push(LabelledCycle::PosTransposition { a: 2 * i + 1, b: 2 * i + 2, label: 0 });
    }
    let base = 2 * ty.m;
    for j in 0..ty.k_e {
        cycles.push(LabelledCycle::NegOneCycle { point: base + j + 1, label: 0 });
    }
    for j in 0..ty.k_o {
        cycles.push(LabelledCycle::NegOneCycle { point: base + ty.k_e + j + 1, label: 1 });
    }
    for j in 0..ty.l {
        cycles.push(LabelledCycle::FixedPoint { point: base + ty.k_e + ty.k_o + j + 1 });
    }
    match d.split() {
        None => {}
        Some(SplitInvariant::FMod4 { f_mod4 }) => {
            if f_mod4 == 2 {
                if ty.m >= 1 {
                    cycles[0] = LabelledCycle::NegTransposition { a: 1, b: 2, label: 1 };
                } else {
                    cycles[0] = LabelledCycle::NegOneCycle { point: 1, label: 2 };
                }
            }
        }
        Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4 }) => {
            // Base residue is 2*k_o mod 4; the variant flips it by 2.
            let base_residue = mod4(2 * ty.k_o as i64);
            if f_plus_minus_mod4 != base_residue {
                if ty.m >= 1 {
                    cycles[0] = LabelledCycle::NegTransposition { a: 1, b: 2, label: 0 };
                } else {
                    cycles[0] = LabelledCycle::NegOneCycle { point: base + 1, label: 3 };
                }
            }
        }
        Some(SplitInvariant::MinusAndFMod4 { minus_mod4, f_mod4 }) => {
            // The four representatives of type (m,0,0,0): signs and the label 1
            // placed on the first and last transpositions.
            if minus_mod4 == 2 && f_mod4 == 0 {
                cycles[0] = LabelledCycle::NegTransposition { a: 1, b: 2, label: 0 };
            } else if minus_mod4 == 2 && f_mod4 == 2 {
                cycles[ty.m - 1] =
                    LabelledCycle::NegTransposition { a: n - 1, b: n, label: 1 };
            } else if minus_mod4 == 0 && f_mod4 == 2 {
                cycles[0] = LabelledCycle::NegTransposition { a: 1, b: 2, label: 0 };
                cycles[ty.m - 1] =
                    LabelledCycle::NegTransposition { a: n - 1, b: n, label: 1 };
            }
        }
        Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2 }) => {
            if sum_labels_mod2 == 1 {
                cycles[0] = LabelledCycle::PosTransposition { a: 1, b: 2, label: 1 };
            }
        }
    }
    let rep = LabelledCycleForm::new(n, cycles)
        .expect("canonical cycles partition the points")
        .to_element();
    debug_assert_eq!(class_of(&rep, d.family()).as_ref(), Ok(d));
    rep
}

/// All realizable class descriptors of the family at its rank.
pub fn enumerate_descriptors(family: GroupFamily) -> Vec<ClassDescriptor> {
    let n = family.rank();
    let mut out = Vec::new();
    for m in 0..=n / 2 {
        for k_e in 0..=n - 2 * m {
            for k_o in 0..=n - 2 * m - k_e {
                let l = n - 2 * m - k_e - k_o;
                let ty = LabelledCycleType::new(m, k_e, k_o, l);
                if !type_allowed(family.tag(), ty) {
                    continue;
                }
                match split_kind(family.tag(), ty) {
                    None => out.push(ClassDescriptor::new(family, ty, None).unwrap()),
                    Some(SplitKind::FMod4) => {
                        for r in [0u8, 2] {
                            out.push(
                                ClassDescriptor::new(
                                    family,
                                    ty,
                                    Some(SplitInvariant::FMod4 { f_mod4: r }),
                                )
                                .unwrap(),
                            );
                        }
                    }
                    Some(SplitKind::FPlusMinusMod4) => {
                        for r in [0u8, 2] {
                            out.push(
                                ClassDescriptor::new(
                                    family,
                                    ty,
                                    Some(SplitInvariant::FPlusMinusMod4 { f_plus_minus_mod4: r }),
                                )
                                .unwrap(),
                            );
                        }
                    }
                    Some(SplitKind::MinusAndFMod4) => {
                        for a in [0u8, 2] {
                            for b in [0u8, 2] {
                                out.push(
                                    ClassDescriptor::new(
                                        family,
                                        ty,
                                        Some(SplitInvariant::MinusAndFMod4 {
                                            minus_mod4: a,
                                            f_mod4: b,
                                        }),
                                    )
                                    .unwrap(),
                                );
                            }
                        }
                    }
                    Some(SplitKind::SumLabelsMod2) => {
                        for r in [0u8, 1] {
                            out.push(
                                ClassDescriptor::new(
                                    family,
                                    ty,
                                    Some(SplitInvariant::SumLabelsMod2 { sum_labels_mod2: r }),
                                )
                                .unwrap(),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Finite groups
// ---------------------------------------------------------------------------

/// The finite classical families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FiniteFamily {
    FiniteA,
    FiniteB,
    FiniteD,
}

impl FiniteFamily {
    pub fn contains(self, s: &SignedPermutation) -> bool {
        match self {
            FiniteFamily::FiniteA => s.is_unsigned(),
            FiniteFamily::FiniteB => true,
            FiniteFamily::FiniteD => s.minus() % 2 == 0,
        }
    }
}

/// Signed cycle type `(m, k, l)` of a finite involution, with the `minus mod
/// 4` refinement for the split case of `D` (`k = l = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteClassDescriptor {
    pub family: FiniteFamily,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub minus_mod4: Option<u8>,
}

/// Classify a finite involution.
pub fn finite_class_of(s: &SignedPermutation, family: FiniteFamily) -> Result<FiniteClassDescriptor> {
    if !family.contains(s) {
        return Err(Error::NotAMember(format!("{family:?}")));
    }
    let x = AffineElement::new(s.clone(), vec![0; s.n()])?;
    let form = labelled_cycle_form(&x)?;
    let ty = form.cycle_type();
    let (m, k, l) = (ty.m, ty.k_e + ty.k_o, ty.l);
    let minus_mod4 = (family == FiniteFamily::FiniteD && k == 0 && l == 0)
        .then(|| mod4(s.minus() as i64));
    Ok(FiniteClassDescriptor { family, n: s.n(), m, k, l, minus_mod4 })
}

// ---------------------------------------------------------------------------
// Conjugator construction
// ---------------------------------------------------------------------------

/// Buckets of the cycles of a form, each sorted by smallest point.
struct Buckets<'a> {
    transpositions: Vec<&'a LabelledCycle>,
    even_cycles: Vec<&'a LabelledCycle>,
    odd_cycles: Vec<&'a LabelledCycle>,
    fixed: Vec<&'a LabelledCycle>,
}

fn buckets(form: &LabelledCycleForm) -> Buckets<'_> {
    let mut b = Buckets {
        transpositions: Vec::new(),
        even_cycles: Vec::new(),
        odd_cycles: Vec::new(),
        fixed: Vec::new(),
    };
    for c in &form.cycles {
        match c {
            LabelledCycle::PosTransposition { .. } | LabelledCycle::NegTransposition { .. } => {
                b.transpositions.push(c)
            }
            LabelledCycle::NegOneCycle { label, .. } => {
                if label.rem_euclid(2) == 0 {
                    b.even_cycles.push(c)
                } else {
                    b.odd_cycles.push(c)
                }
            }
            LabelledCycle::FixedPoint { .. } => b.fixed.push(c),
        }
    }
    b
}

fn cycle_sign(c: &LabelledCycle) -> Sign {
    match c {
        LabelledCycle::PosTransposition { .. } => Sign::Plus,
        LabelledCycle::NegTransposition { .. } => Sign::Minus,
        _ => unreachable!("sign of a transposition"),
    }
}

/// A conjugator in the ambient family taking `x` to `y`, built in two stages:
/// a finite signed permutation aligning cycle positions and signs, then a pure
/// translation matching the labels.
fn conjugator_in_ambient(
    x: &AffineElement,
    fx: &LabelledCycleForm,
    fy: &LabelledCycleForm,
) -> Option<AffineElement> {
    let n = fx.n;
    let bx = buckets(fx);
    let by = buckets(fy);
    if bx.transpositions.len() != by.transpositions.len()
        || bx.even_cycles.len() != by.even_cycles.len()
        || bx.odd_cycles.len() != by.odd_cycles.len()
        || bx.fixed.len() != by.fixed.len()
    {
        return None;
    }
    // Stage 1: point map with signs chosen so conjugation reproduces the
    // target cycle signs; labels are preserved exactly by mapping smaller
    // points to smaller points with sign +.
    let mut images: Vec<(usize, Sign)> = (1..=n).map(|i| (i, Sign::Plus)).collect();
    for (cx, cy) in bx.transpositions.iter().zip(&by.transpositions) {
        let (a, b) = match **cx {
            LabelledCycle::PosTransposition { a, b, .. }
            | LabelledCycle::NegTransposition { a, b, .. } => (a, b),
            _ => unreachable!(),
        };
        let (a2, b2) = match **cy {
            LabelledCycle::PosTransposition { a, b, .. }
            | LabelledCycle::NegTransposition { a, b, .. } => (a, b),
            _ => unreachable!(),
        };
        let eps = if cycle_sign(cx) == cycle_sign(cy) { Sign::Plus } else { Sign::Minus };
        images[a - 1] = (a2, Sign::Plus);
        images[b - 1] = (b2, eps);
    }
    for (cx, cy) in bx
        .even_cycles
        .iter()
        .zip(&by.even_cycles)
        .chain(bx.odd_cycles.iter().zip(&by.odd_cycles))
        .chain(bx.fixed.iter().zip(&by.fixed))
    {
        let p = cx.min_point();
        let q = cy.min_point();
        images[p - 1] = (q, Sign::Plus);
    }
    let g = SignedPermutation::from_images(&images).ok()?;
    let g = AffineElement::new(g, vec![0; n]).ok()?;
    let aligned = x.conjugate_by(&g).ok()?;
    let fa = labelled_cycle_form(&aligned).ok()?;

    // Stage 2: translation fixing the labels cycle by cycle.
    let mut w = vec![0i64; n];
    for (ca, cy) in fa.cycles.iter().zip(&fy.cycles) {
        match (*ca, *cy) {
            (
                LabelledCycle::PosTransposition { a, label: la, .. },
                LabelledCycle::PosTransposition { label: ly, .. },
            )
            | (
                LabelledCycle::NegTransposition { a, label: la, .. },
                LabelledCycle::NegTransposition { label: ly, .. },
            ) => {
                w[a - 1] = ly - la;
            }
            (
                LabelledCycle::NegOneCycle { point, label: la },
                LabelledCycle::NegOneCycle { label: ly, .. },
            ) => {
                debug_assert_eq!((ly - la).rem_euclid(2), 0);
                w[point - 1] = (ly - la) / 2;
            }
            (LabelledCycle::FixedPoint { .. }, LabelledCycle::FixedPoint { .. }) => {}
            _ => return None, // alignment failed
        }
    }
    AffineElement::new(g.sigma, w).ok()
}

/// Centralizer knobs of `x`, as (element, B-parity defect, Bbar-parity defect)
/// where the defects say how left-composing flips `sum mod 2` and
/// `(sum + minus) mod 2` of a conjugator.
fn centralizer_knobs(x: &AffineElement, fx: &LabelledCycleForm) -> Vec<(AffineElement, u8, u8)> {
    let n = fx.n;
    let mut knobs = Vec::new();
    for c in &fx.cycles {
        match *c {
            LabelledCycle::NegOneCycle { point, label } => {
                let e = AffineElement::neg_one_cycle(n, point, label);
                if label.rem_euclid(2) == 0 {
                    knobs.push((e, 0, 1));
                } else {
                    knobs.push((e, 1, 0));
                }
            }
            LabelledCycle::FixedPoint { point } => {
                let mut w = vec![0; n];
                w[point - 1] = 1;
                knobs.push((AffineElement::translation(w), 1, 1));
                knobs.push((AffineElement::neg_one_cycle(n, point, 0), 0, 1));
            }
            _ => {}
        }
    }
    debug_assert!(knobs.iter().all(|(e, _, _)| {
        e.multiply(x).unwrap() == x.multiply(e).unwrap()
    }));
    knobs
}

/// An element `g` of `family` with `x^g = y`, when `x` and `y` are conjugate
/// involutions of the family; `None` otherwise.
pub fn find_conjugator(
    x: &AffineElement,
    y: &AffineElement,
    family: GroupFamily,
) -> Option<AffineElement> {
    let dx = class_of(x, family).ok()?;
    let dy = class_of(y, family).ok()?;
    if dx != dy {
        return None;
    }
    if x == y {
        return Some(AffineElement::identity(x.n()));
    }
    let fx = labelled_cycle_form(x).ok()?;
    let fy = labelled_cycle_form(y).ok()?;

    if family.tag() == FamilyTag::AffineA {
        let h = conjugator_in_type_a(&fx, &fy)?;
        debug_assert_eq!(x.conjugate_by(&h).unwrap(), *y);
        debug_assert!(family.contains(&h));
        return Some(h);
    }

    let mut h = conjugator_in_ambient(x, &fx, &fy)?;
    // Correct membership parities by left-composing centralizer elements.
    let need_b = matches!(family.tag(), FamilyTag::AffineB | FamilyTag::AffineD);
    let need_bbar = matches!(family.tag(), FamilyTag::AffineBbar | FamilyTag::AffineD);
    let defect = |h: &AffineElement| -> (u8, u8) {
        let s = h.coordinate_sum();
        let db = if need_b { mod2(s) } else { 0 };
        let dbb = if need_bbar { mod2(s + h.minus() as i64) } else { 0 };
        (db, dbb)
    };
    if defect(&h) != (0, 0) {
        let knobs = centralizer_knobs(x, &fx);
        let (want_b, want_bbar) = defect(&h);
        let mut fixed = false;
        // Try a single knob, then pairs of distinct knobs.
        'outer: for i in 0..knobs.len() {
            let (e1, b1, bb1) = &knobs[i];
            if (need_b as u8 * b1 % 2, need_bbar as u8 * bb1 % 2)
                == (want_b, want_bbar)
            {
                h = e1.multiply(&h).ok()?;
                fixed = true;
                break;
            }
            for (e2, b2, bb2) in knobs.iter().skip(i + 1) {
                if (need_b as u8 * ((b1 + b2) % 2), need_bbar as u8 * ((bb1 + bb2) % 2))
                    == (want_b, want_bbar)
                {
                    h = e1.multiply(&e2.multiply(&h).ok()?).ok()?;
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if !fixed {
            debug_assert!(false, "no centralizer correction found for equal descriptors");
            return None;
        }
    }
    debug_assert_eq!(x.conjugate_by(&h).unwrap(), *y);
    debug_assert!(family.contains(&h));
    Some(h)
}

/// Conjugator construction inside type `A`: an unsigned point map plus a
/// translation of coordinate sum zero.
fn conjugator_in_type_a(fx: &LabelledCycleForm, fy: &LabelledCycleForm) -> Option<AffineElement> {
    let n = fx.n;
    let bx = buckets(fx);
    let by = buckets(fy);
    let mut images: Vec<(usize, Sign)> = (1..=n).map(|i| (i, Sign::Plus)).collect();
    let mut pair_targets = Vec::new();
    for (cx, cy) in bx.transpositions.iter().zip(&by.transpositions) {
        let (LabelledCycle::PosTransposition { a, b, label: la },
             LabelledCycle::PosTransposition { a: a2, b: b2, label: ly }) = (**cx, **cy)
        else {
            return None;
        };
        images[a - 1] = (a2, Sign::Plus);
        images[b - 1] = (b2, Sign::Plus);
        pair_targets.push((a2, b2, ly - la));
    }
    let mut fixed_targets = Vec::new();
    for (cx, cy) in bx.fixed.iter().zip(&by.fixed) {
        images[cx.min_point() - 1] = (cy.min_point(), Sign::Plus);
        fixed_targets.push(cy.min_point());
    }
    let g = SignedPermutation::from_images(&images).ok()?;
    let mut w = vec![0i64; n];
    for &(a2, _b2, delta) in &pair_targets {
        w[a2 - 1] = delta;
    }
    // Zero the coordinate sum: soak into a fixed point if any, else spread an
    // even surplus across a transposition pair.
    let surplus: i64 = w.iter().sum();
    if let Some(&d) = fixed_targets.first() {
        w[d - 1] -= surplus;
    } else {
        if surplus % 2 != 0 {
            return None;
        }
        let (a2, b2, _) = *pair_targets.first()?;
        w[a2 - 1] -= surplus / 2;
        w[b2 - 1] -= surplus / 2;
    }
    let h = AffineElement::new(g, w).ok()?;
    debug_assert_eq!(h.coordinate_sum(), 0);
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_element;

    fn fam(tag: FamilyTag, n: usize) -> GroupFamily {
        GroupFamily::new(tag, n).unwrap()
    }

    #[test]
    fn affine_c_rep_matches_theorem_normal_form() {
        let d = ClassDescriptor::new(
            fam(FamilyTag::AffineC, 8),
            LabelledCycleType::new(1, 2, 3, 1),
            None,
        )
        .unwrap();
        let rep = canonical_representative(&d);
        let expected =
            parse_element("(+1 2)^0 (-3)^0 (-4)^0 (-5)^1 (-6)^1 (-7)^1 (+8)^0", 8).unwrap();
        assert_eq!(rep, expected);
    }

    #[test]
    fn type_determines_class_in_affine_c() {
        let c = fam(FamilyTag::AffineC, 6);
        let x = parse_element("(+1 2)^0 (-3)^0 (-4)^0 (-5)^0 (-6)^0", 6).unwrap();
        let y = parse_element("(+1 2)^0 (-3)^2 (-4)^0 (-5)^0 (-6)^0", 6).unwrap();
        assert_eq!(class_of(&x, c).unwrap(), class_of(&y, c).unwrap());
    }

    #[test]
    fn affine_b_split_by_f_mod4() {
        let b = fam(FamilyTag::AffineB, 6);
        let w1 = parse_element("(-1 2)^1 (+3 4)^0 (-5)^0 (-6)^0", 6).unwrap();
        let w2 = parse_element("(+1 2)^0 (+3 4)^0 (-5)^0 (-6)^0", 6).unwrap();
        let d1 = class_of(&w1, b).unwrap();
        let d2 = class_of(&w2, b).unwrap();
        assert_ne!(d1, d2);
        assert_eq!(d1.split(), Some(SplitInvariant::FMod4 { f_mod4: 2 }));
        assert_eq!(d2.split(), Some(SplitInvariant::FMod4 { f_mod4: 0 }));
        assert_eq!(canonical_representative(&d1), w1);
        assert_eq!(canonical_representative(&d2), w2);
    }

    #[test]
    fn finite_d4_worked_example() {
        // (+1 2)(+3 4) is conjugate to (-1 2)(-3 4) but not to (-1 2)(+3 4).
        let a = parse_element("(+1 2)^0 (+3 4)^0", 4).unwrap();
        let b = parse_element("(-1 2)^0 (-3 4)^0", 4).unwrap();
        let c = parse_element("(-1 2)^0 (+3 4)^0", 4).unwrap();
        let da = finite_class_of(&a.sigma, FiniteFamily::FiniteD).unwrap();
        let db = finite_class_of(&b.sigma, FiniteFamily::FiniteD).unwrap();
        let dc = finite_class_of(&c.sigma, FiniteFamily::FiniteD).unwrap();
        assert_eq!(da, db);
        assert_ne!(da, dc);
        assert_eq!((da.m, da.k, da.l), (2, 0, 0));
        assert_eq!(da.minus_mod4, Some(0));
        assert_eq!(dc.minus_mod4, Some(2));
    }

    #[test]
    fn finite_b_one_cycles() {
        let x = parse_element("(-1)^0 (-2)^0", 2).unwrap();
        let d = finite_class_of(&x.sigma, FiniteFamily::FiniteB).unwrap();
        assert_eq!((d.m, d.k, d.l), (0, 2, 0));
        assert_eq!(d.minus_mod4, None);
    }

    #[test]
    fn theorem_translation_conjugator() {
        // Normalized pair differing only in labels: the two-stage construction
        // reduces to the translation w with w_{2i-1} = l'_i, w_{2i} = l_i,
        // w_{2m+j} = (mu'_j - mu_j)/2.
        let x = parse_element("(+1 2)^1 (-3)^2 (-4)^0", 4).unwrap();
        let y = parse_element("(+1 2)^-1 (-3)^0 (-4)^2", 4).unwrap();
        let w = AffineElement::translation(vec![-1, 1, -1, 1]);
        assert_eq!(x.conjugate_by(&w).unwrap(), y);
        let b = fam(FamilyTag::AffineB, 4);
        let h = find_conjugator(&x, &y, b).unwrap();
        assert_eq!(x.conjugate_by(&h).unwrap(), y);
        assert!(b.contains(&h));
    }

    #[test]
    fn identity_conjugator_for_equal_elements() {
        let x = parse_element("(+1 2)^1 (-3)^2 (-4)^0", 4).unwrap();
        let h = find_conjugator(&x, &x, fam(FamilyTag::AffineC, 4)).unwrap();
        assert!(h.is_identity());
    }

    #[test]
    fn conjugator_absent_across_classes() {
        let b = fam(FamilyTag::AffineB, 6);
        let w1 = parse_element("(-1 2)^1 (+3 4)^0 (-5)^0 (-6)^0", 6).unwrap();
        let w2 = parse_element("(+1 2)^0 (+3 4)^0 (-5)^0 (-6)^0", 6).unwrap();
        assert!(find_conjugator(&w1, &w2, b).is_none());
        // But they are conjugate in the ambient family.
        let c = fam(FamilyTag::AffineC, 6);
        let h = find_conjugator(&w1, &w2, c).unwrap();
        assert_eq!(w1.conjugate_by(&h).unwrap(), w2);
    }

    #[test]
    fn descriptor_compact_text_roundtrip() {
        for d in enumerate_descriptors(fam(FamilyTag::AffineD, 4)) {
            let text = d.to_compact_text();
            assert_eq!(ClassDescriptor::from_compact_text(&text).unwrap(), d);
        }
        let d = ClassDescriptor::from_compact_text("B:n=6:(2,2,0,0):f=0").unwrap();
        assert_eq!(d.cycle_type(), LabelledCycleType::new(2, 2, 0, 0));
    }

    #[test]
    fn descriptor_json_matches_schema() {
        let d = ClassDescriptor::from_compact_text("B:n=6:(1,4,0,0):f=2").unwrap();
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"family":"AffineB","n":6,"type":[1,4,0,0],"split":{"f_mod4":2}})
        );
        let back: ClassDescriptor = serde_json::from_value(json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn canonical_reps_classify_back() {
        for tag in [
            FamilyTag::AffineA,
            FamilyTag::AffineB,
            FamilyTag::AffineBbar,
            FamilyTag::AffineC,
            FamilyTag::AffineD,
        ] {
            for n in tag.min_rank()..=8 {
                let family = fam(tag, n);
                for d in enumerate_descriptors(family) {
                    let rep = canonical_representative(&d);
                    assert_eq!(class_of(&rep, family).unwrap(), d, "rep mismatch for {d}");
                }
            }
        }
    }
}
