//! Named verification suites, shared by the `verify` subcommand and the
//! acceptance tests: `lemmas`, `conjugacy`, `connectivity`, `diameters`,
//! `finite-baseline`, `all`.

use crate::commuting::{commutes_fast, commutes_oracle, neighbors_in_class};
use crate::conjugacy::{
    canonical_representative, class_of, enumerate_descriptors, finite_class_of, ClassDescriptor,
    FiniteClassDescriptor, FiniteFamily, SplitInvariant,
};
use crate::construct::constructive_path;
use crate::element::{AffineElement, FamilyTag, GroupFamily, Sign, SignedPermutation};
use crate::enumerate::{
    enumerate_class_window, enumerate_finite_class, random_involution,
};
use crate::error::{Error, Result};
use crate::graph::{
    components_in_window, diameter_bound, finite_class_graph_summary, obstruction_value,
    predict_connectivity, CertificateKind, ClassSearcher, ConnectivityVerdict,
    DisconnectionClause, WindowSpec,
};
use crate::involution::{
    invariants, is_involution, labelled_cycle_type, omega,
    structural_involution_criterion, LabelledCycleType,
};
use crate::text::parse_element;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

/// Report of one suite run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Knobs for a suite run. `rank_filter` restricts the desk-scale sweeps to a
/// single rank; `window` overrides the default window of 2.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub rank_filter: Option<usize>,
    pub window: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, rank_filter: None, window: 2 }
    }
}

pub const SUITES: [&str; 6] =
    ["lemmas", "conjugacy", "connectivity", "diameters", "finite-baseline", "all"];

/// Run a named suite.
pub fn run_suite(name: &str, config: &VerifyConfig) -> Result<SuiteReport> {
    let checks = match name {
        "lemmas" => lemmas_checks(config),
        "conjugacy" => conjugacy_checks(config),
        "connectivity" => connectivity_checks(config),
        "diameters" => diameters_checks(config),
        "finite-baseline" => finite_baseline_checks(config),
        "all" => {
            let mut all = lemmas_checks(config);
            all.extend(conjugacy_checks(config));
            all.extend(connectivity_checks(config));
            all.extend(diameters_checks(config));
            all.extend(finite_baseline_checks(config));
            all
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport { suite: name.to_string(), seed: config.seed, checks })
}

fn check(name: &str, passed: bool, details: String) -> CheckResult {
    CheckResult { name: name.to_string(), passed, details }
}

fn ranks(config: &VerifyConfig, default: &[usize]) -> Vec<usize> {
    match config.rank_filter {
        Some(n) => default.iter().copied().filter(|&r| r == n).collect(),
        None => default.to_vec(),
    }
}

fn families_at(n: usize) -> Vec<GroupFamily> {
    [FamilyTag::AffineB, FamilyTag::AffineBbar, FamilyTag::AffineC, FamilyTag::AffineD]
        .iter()
        .filter_map(|&tag| GroupFamily::new(tag, n).ok())
        .collect()
}

// ---------------------------------------------------------------------------
// Suite: lemmas
// ---------------------------------------------------------------------------

fn lemmas_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = || -3i64..=3;

    // One-cycle rules.
    let mut failures = 0usize;
    let mut cases = 0usize;
    for l in grid() {
        for m in grid() {
            let x = parse_element(&format!("(-1)^{l}"), 2).unwrap();
            let y = parse_element(&format!("(-1)^{m}"), 2).unwrap();
            cases += 1;
            if commutes_oracle(&x, &y).unwrap() != (l == m) {
                failures += 1;
            }
            // Against a fixed point on the same spot.
            let y = parse_element("(-2)^0", 2).unwrap();
            cases += 1;
            if !commutes_oracle(&x, &y).unwrap() {
                failures += 1;
            }
        }
    }
    out.push(check("lemma-one-cycles", failures == 0, format!("{cases} cases, {failures} failures")));

    // Same-pair transposition rules.
    let mut failures = 0usize;
    let mut cases = 0usize;
    for l in grid() {
        for m in grid() {
            for (sx, sy, expect) in [
                ("+", "+", l == m),
                ("-", "-", l == m),
                ("+", "-", true),
            ] {
                let x = parse_element(&format!("({sx}1 2)^{l}"), 2).unwrap();
                let y = parse_element(&format!("({sy}1 2)^{m}"), 2).unwrap();
                cases += 1;
                if commutes_oracle(&x, &y).unwrap() != expect {
                    failures += 1;
                }
            }
        }
    }
    out.push(check("lemma-same-pair", failures == 0, format!("{cases} cases, {failures} failures")));

    // Transposition against fixed/negative 1-cycles on its support.
    let mut failures = 0usize;
    let mut cases = 0usize;
    for l in grid() {
        for s in ["+", "-"] {
            // Both points fixed by the partner: always commute.
            let x = parse_element(&format!("({s}1 2)^{l} (+3)^0 (+4)^0"), 4).unwrap();
            let y = parse_element("(+1)^0 (+2)^0 (-3)^0 (-4)^0", 4).unwrap();
            cases += 1;
            if !commutes_oracle(&x, &y).unwrap() {
                failures += 1;
            }
            // One fixed, one negative: never commute.
            for m in grid() {
                let y = parse_element(&format!("(+1)^0 (-2)^{m} (-3)^0 (-4)^0"), 4).unwrap();
                cases += 1;
                if commutes_oracle(&x, &y).unwrap() {
                    failures += 1;
                }
                let y = parse_element(&format!("(-1)^{m} (+2)^0 (-3)^0 (-4)^0"), 4).unwrap();
                cases += 1;
                if commutes_oracle(&x, &y).unwrap() {
                    failures += 1;
                }
            }
            // Two negative 1-cycles: the label rule.
            for mu in grid() {
                for nu in grid() {
                    let x = parse_element(&format!("({s}1 2)^{l}"), 2).unwrap();
                    let y = parse_element(&format!("(-1)^{mu} (-2)^{nu}"), 2).unwrap();
                    let expect = if s == "+" { mu - nu == 2 * l } else { mu + nu == 2 * l };
                    cases += 1;
                    if commutes_oracle(&x, &y).unwrap() != expect {
                        failures += 1;
                    }
                }
            }
        }
    }
    out.push(check(
        "lemma-pair-vs-one-cycles",
        failures == 0,
        format!("{cases} cases, {failures} failures"),
    ));

    // Double transposition table, both directions of each iff.
    let mut failures = 0usize;
    let mut cases = 0usize;
    type Rule = (&'static str, &'static str, fn(i64, i64, i64, i64) -> bool);
    let rules: [Rule; 6] = [
        ("(+1 2)^{l1} (+3 4)^{l2}", "(+1 3)^{m1} (+2 4)^{m2}", |l1, l2, m1, m2| {
            m1 - l1 == m2 - l2
        }),
        ("(+1 2)^{l1} (+3 4)^{l2}", "(+1 3)^{m1} (-2 4)^{m2}", |_, _, _, _| false),
        ("(+1 2)^{l1} (+3 4)^{l2}", "(-1 3)^{m1} (-2 4)^{m2}", |l1, l2, m1, m2| {
            m1 - l1 == m2 + l2
        }),
        ("(+1 2)^{l1} (-3 4)^{l2}", "(+1 3)^{m1} (-2 4)^{m2}", |l1, l2, m1, m2| {
            m1 - l1 == m2 - l2
        }),
        ("(+1 2)^{l1} (-3 4)^{l2}", "(-1 3)^{m1} (-2 4)^{m2}", |_, _, _, _| false),
        ("(-1 2)^{l1} (-3 4)^{l2}", "(-1 3)^{m1} (-2 4)^{m2}", |l1, l2, m1, m2| {
            m1 - l1 == l2 - m2
        }),
    ];
    for (gt, ht, rule) in rules {
        for l1 in grid() {
            for l2 in grid() {
                for m1 in grid() {
                    for m2 in grid() {
                        let gs = gt.replace("{l1}", &l1.to_string()).replace("{l2}", &l2.to_string());
                        let hs = ht.replace("{m1}", &m1.to_string()).replace("{m2}", &m2.to_string());
                        let g = parse_element(&gs, 4).unwrap();
                        let h = parse_element(&hs, 4).unwrap();
                        cases += 1;
                        if commutes_oracle(&g, &h).unwrap() != rule(l1, l2, m1, m2) {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    out.push(check(
        "lemma-double-transpositions",
        failures == 0,
        format!("{cases} cases, {failures} failures"),
    ));

    // Structural involution criterion == multiplicative criterion,
    // exhaustively for n <= 4 with labels in [-2, 2].
    let mut failures = 0usize;
    let mut cases = 0usize;
    for n in 1..=4usize {
        for x in all_elements(n, 2) {
            cases += 1;
            let multiplicative = !x.is_identity() && x.multiply(&x).unwrap().is_identity();
            if multiplicative != structural_involution_criterion(&x) {
                failures += 1;
            }
        }
    }
    out.push(check(
        "involution-criterion",
        failures == 0,
        format!("{cases} elements, {failures} disagreements"),
    ));

    // commutes_fast == commutes_oracle: exhaustive for n <= 4, labels [-2,2].
    let involutions: Vec<AffineElement> = all_involutions(4, 2);
    let disagreements: usize = involutions
        .par_iter()
        .map(|x| {
            involutions
                .iter()
                .filter(|y| {
                    commutes_fast(x, y).unwrap() != commutes_oracle(x, y).unwrap()
                })
                .count()
        })
        .sum();
    out.push(check(
        "fast-vs-oracle-exhaustive",
        disagreements == 0,
        format!("{} pairs, {} disagreements", involutions.len() * involutions.len(), disagreements),
    ));

    // Randomized agreement at n <= 8 with labels in [-3, 3].
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x1e3a);
    let mut failures = 0usize;
    let total = 100_000usize;
    for _ in 0..total {
        let n = rng.gen_range(5..=8);
        let x = random_involution(n, 3, &mut rng);
        let y = random_involution(n, 3, &mut rng);
        if commutes_fast(&x, &y).unwrap() != commutes_oracle(&x, &y).unwrap() {
            failures += 1;
        }
    }
    out.push(check(
        "fast-vs-oracle-random",
        failures == 0,
        format!("{total} random pairs, {failures} disagreements"),
    ));

    out
}

/// Every element (sigma, v) of rank `n` with labels bounded by `bound`.
fn all_elements(n: usize, bound: i64) -> Vec<AffineElement> {
    let mut sigmas = Vec::new();
    let mut points: Vec<usize> = (0..n).collect();
    permutations(&mut points, 0, &mut |perm| {
        for signs in 0..(1u32 << n) {
            let images: Vec<(usize, Sign)> = (0..n)
                .map(|i| {
                    let sign = if signs >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
                    (perm[i] + 1, sign)
                })
                .collect();
            sigmas.push(SignedPermutation::from_images(&images).unwrap());
        }
    });
    let mut out = Vec::new();
    for sigma in sigmas {
        let mut v = vec![-bound; n];
        loop {
            out.push(AffineElement::new(sigma.clone(), v.clone()).unwrap());
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                v[i] += 1;
                if v[i] <= bound {
                    break;
                }
                v[i] = -bound;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

fn permutations(points: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == points.len() {
        f(points);
        return;
    }
    for i in k..points.len() {
        points.swap(k, i);
        permutations(points, k + 1, f);
        points.swap(k, i);
    }
}

fn all_involutions(n: usize, bound: i64) -> Vec<AffineElement> {
    all_elements(n, bound)
        .into_iter()
        .filter(is_involution_ref)
        .collect()
}

fn is_involution_ref(x: &AffineElement) -> bool {
    is_involution(x)
}

// ---------------------------------------------------------------------------
// Suite: conjugacy
// ---------------------------------------------------------------------------

fn conjugacy_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();

    // Worked-example exactness.
    {
        let g = parse_element("(+1 2)^1 (-3 4)^3 (-5)^2 (-6)^4 (+7)^0", 7).unwrap();
        let ig = invariants(&g);
        let w = omega(&g).unwrap();
        let iw = invariants(&w);
        // The printed value of f on the image follows the written orientation,
        // recovered exactly by the identity f(omega(x)) = minus(x) - f(x).
        let f_image_exact = ig.minus as i64 - ig.f.unwrap();
        let ok = ig.sum == 12
            && ig.f == Some(14)
            && ig.minus == 4
            && iw.sum == -8
            && iw.minus == 4
            && f_image_exact == -10
            && (iw.f.unwrap() - f_image_exact).rem_euclid(4) == 0;
        let ty = labelled_cycle_type(
            &parse_element("(+1 2)^0 (-3)^2 (-4)^1 (-5)^3 (-6)^0 (-7)^3 (+8)^0", 8).unwrap(),
        )
        .unwrap();
        let ok = ok && ty == LabelledCycleType::new(1, 2, 3, 1);
        out.push(check(
            "worked-examples",
            ok,
            format!(
                "sum={} f={:?} minus={} | image sum={} f_exact={} | type={}",
                ig.sum, ig.f, ig.minus, iw.sum, f_image_exact, ty
            ),
        ));
    }

    // Canonical representatives classify back, all families, n <= 8.
    {
        let mut failures = 0usize;
        let mut cases = 0usize;
        for tag in [
            FamilyTag::AffineA,
            FamilyTag::AffineB,
            FamilyTag::AffineBbar,
            FamilyTag::AffineC,
            FamilyTag::AffineD,
        ] {
            for n in tag.min_rank()..=8 {
                let family = GroupFamily::new(tag, n).unwrap();
                for d in enumerate_descriptors(family) {
                    cases += 1;
                    if class_of(&canonical_representative(&d), family) != Ok(d) {
                        failures += 1;
                    }
                }
            }
        }
        out.push(check(
            "representative-roundtrip",
            failures == 0,
            format!("{cases} descriptors, {failures} failures"),
        ));
    }

    // Exhaustive conjugator construction at n <= 5, labels in [-2, 2]: every
    // member reaches its representative; sampled same-class pairs conjugate;
    // distinct descriptors yield no conjugator.
    {
        let results: Vec<(usize, usize)> = ranks(config, &[3, 4, 5])
            .into_par_iter()
            .map(|n| {
                let mut failures = 0usize;
                let mut cases = 0usize;
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ n as u64);
                for family in all_families_at(n) {
                    for d in enumerate_descriptors(family) {
                        let rep = canonical_representative(&d);
                        let members = enumerate_class_window(&d, 2).unwrap();
                        for x in &members {
                            cases += 1;
                            match crate::conjugacy::find_conjugator(x, &rep, family) {
                                Some(h) => {
                                    if x.conjugate_by(&h).unwrap() != rep || !family.contains(&h) {
                                        failures += 1;
                                    }
                                }
                                None => failures += 1,
                            }
                        }
                        // Sampled same-class pairs.
                        for _ in 0..30.min(members.len()) {
                            let x = members.choose(&mut rng).unwrap();
                            let y = members.choose(&mut rng).unwrap();
                            cases += 1;
                            match crate::conjugacy::find_conjugator(x, y, family) {
                                Some(h) => {
                                    if x.conjugate_by(&h).unwrap() != *y || !family.contains(&h) {
                                        failures += 1;
                                    }
                                }
                                None => failures += 1,
                            }
                        }
                    }
                    // Cross-class pairs must fail.
                    let descriptors = enumerate_descriptors(family);
                    for pair in descriptors.windows(2) {
                        let x = canonical_representative(&pair[0]);
                        let y = canonical_representative(&pair[1]);
                        cases += 1;
                        if crate::conjugacy::find_conjugator(&x, &y, family).is_some() {
                            failures += 1;
                        }
                    }
                }
                (cases, failures)
            })
            .collect();
        let cases: usize = results.iter().map(|r| r.0).sum();
        let failures: usize = results.iter().map(|r| r.1).sum();
        out.push(check(
            "conjugator-soundness-completeness",
            failures == 0,
            format!("{cases} checks, {failures} failures"),
        ));
    }

    // Descriptor invariance under random conjugation, n <= 8.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x77aa);
        let mut failures = 0usize;
        let total = 10_000usize;
        for _ in 0..total {
            let n = rng.gen_range(4..=8);
            let x = random_involution(n, 2, &mut rng);
            for family in all_families_at(n) {
                if !family.contains(&x) {
                    continue;
                }
                let Ok(dx) = class_of(&x, family) else { continue };
                let gens = family.generators();
                let mut g = AffineElement::identity(n);
                for _ in 0..rng.gen_range(0..=12) {
                    g = g.multiply(gens.choose(&mut rng).unwrap()).unwrap();
                }
                let y = x.conjugate_by(&g).unwrap();
                if class_of(&y, family) != Ok(dx) {
                    failures += 1;
                }
            }
        }
        out.push(check(
            "descriptor-invariance",
            failures == 0,
            format!("{total} random conjugations, {failures} failures"),
        ));
    }

    // Splitting counts: distinct descriptors observed per type match the
    // theorems (2 in B for (m,k_e,0,0), 2 in Bbar for (m,0,k_o,0), 4 in D for
    // (m,0,0,0), 2 in A without fixed points, 1 otherwise).
    {
        let mut failures = 0usize;
        let mut cases = 0usize;
        for n in ranks(config, &[4, 5]) {
            for family in all_families_at(n) {
                use std::collections::{BTreeMap, BTreeSet};
                let mut by_type: BTreeMap<LabelledCycleType, BTreeSet<String>> = BTreeMap::new();
                for d in enumerate_descriptors(family) {
                    for x in enumerate_class_window(&d, 2).unwrap() {
                        let observed = class_of(&x, family).unwrap();
                        by_type
                            .entry(observed.cycle_type())
                            .or_default()
                            .insert(observed.to_compact_text());
                    }
                }
                for (ty, seen) in by_type {
                    let expected = match crate::conjugacy::split_kind(family.tag(), ty) {
                        None => 1,
                        Some(crate::conjugacy::SplitKind::MinusAndFMod4) => 4,
                        Some(_) => 2,
                    };
                    cases += 1;
                    if seen.len() != expected {
                        failures += 1;
                    }
                }
            }
        }
        out.push(check(
            "splitting-counts",
            failures == 0,
            format!("{cases} types checked, {failures} mismatches"),
        ));
    }

    // Conjugation by (-n)^1 swaps the two split descriptors in B.
    {
        let mut failures = 0usize;
        let mut cases = 0usize;
        for n in ranks(config, &[4, 5, 6]) {
            let family = GroupFamily::new(FamilyTag::AffineB, n).unwrap();
            let swap = AffineElement::neg_one_cycle(n, n, 1);
            for d in enumerate_descriptors(family) {
                let Some(SplitInvariant::FMod4 { f_mod4 }) = d.split() else { continue };
                let x = canonical_representative(&d);
                let y = x.conjugate_by(&swap).unwrap();
                let dy = class_of(&y, family).unwrap();
                cases += 1;
                if dy.split() != Some(SplitInvariant::FMod4 { f_mod4: (f_mod4 + 2) % 4 }) {
                    failures += 1;
                }
            }
        }
        out.push(check(
            "index-two-swap",
            failures == 0,
            format!("{cases} split classes, {failures} failures"),
        ));
    }

    // omega maps each split B class onto a single Bbar class with the
    // predicted residue correspondence.
    {
        let mut failures = 0usize;
        let mut cases = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x03e6_a000);
        for n in ranks(config, &[4, 5]) {
            let b = GroupFamily::new(FamilyTag::AffineB, n).unwrap();
            let bbar = GroupFamily::new(FamilyTag::AffineBbar, n).unwrap();
            for d in enumerate_descriptors(b) {
                if d.split().is_none() {
                    continue;
                }
                let members = enumerate_class_window(&d, 2).unwrap();
                let image_class = class_of(&omega(&canonical_representative(&d)).unwrap(), bbar);
                for x in members.choose_multiple(&mut rng, 20) {
                    cases += 1;
                    let w = omega(x).unwrap();
                    if !bbar.contains(&w) || class_of(&w, bbar) != image_class {
                        failures += 1;
                    }
                }
            }
        }
        out.push(check(
            "omega-class-correspondence",
            failures == 0,
            format!("{cases} samples, {failures} failures"),
        ));
    }

    out
}

fn all_families_at(n: usize) -> Vec<GroupFamily> {
    [
        FamilyTag::AffineA,
        FamilyTag::AffineB,
        FamilyTag::AffineBbar,
        FamilyTag::AffineC,
        FamilyTag::AffineD,
    ]
    .iter()
    .filter_map(|&tag| GroupFamily::new(tag, n).ok())
    .collect()
}

// ---------------------------------------------------------------------------
// Suite: connectivity (disconnection clauses, criterion 5)
// ---------------------------------------------------------------------------

fn connectivity_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    let window = config.window;
    let mut out = Vec::new();
    let rank_list = ranks(config, &[4, 5, 6]);

    // Every disconnected-predicted class: the certificate's obstruction is
    // conserved across every window edge, and at least two obstruction values
    // occur (so the class really splits).
    let per_descriptor: Vec<(String, bool, String)> = rank_list
        .iter()
        .flat_map(|&n| families_at(n).into_iter().map(move |f| (n, f)))
        .flat_map(|(_, family)| enumerate_descriptors(family))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|d| {
            let verdict = predict_connectivity(&d).ok()?;
            let ConnectivityVerdict::Disconnected { certificate, .. } = verdict else {
                return None;
            };
            let name = d.to_compact_text();
            let result = verify_disconnection(&d, certificate, window);
            Some(match result {
                Ok(details) => (name, true, details),
                Err(e) => (name, false, e.to_string()),
            })
        })
        .collect();
    let failures: Vec<&(String, bool, String)> =
        per_descriptor.iter().filter(|r| !r.1).collect();
    out.push(check(
        "disconnection-certificates",
        failures.is_empty(),
        format!(
            "{} disconnected classes checked at window {window}; failures: {:?}",
            per_descriptor.len(),
            failures.iter().map(|f| &f.0).collect::<Vec<_>>()
        ),
    ));

    // Named reproductions: every rank-4 single-transposition class and the
    // rank-6 (1,2,2,0) case.
    if rank_list.contains(&4) {
        let mut ok = true;
        let mut details = String::new();
        for family in families_at(4) {
            for d in enumerate_descriptors(family) {
                if d.cycle_type().m != 1 {
                    continue;
                }
                match predict_connectivity(&d) {
                    Ok(ConnectivityVerdict::Disconnected { clauses, .. })
                        if clauses.contains(&DisconnectionClause::RankFourSingleTransposition) => {}
                    other => {
                        ok = false;
                        details = format!("{}: {:?}", d.to_compact_text(), other);
                    }
                }
            }
        }
        out.push(check("rank-four-reproduction", ok, details));
    }
    if rank_list.contains(&6) {
        let result = rank_six_reproduction(window);
        out.push(match result {
            Ok(details) => check("rank-six-one-two-two", true, details),
            Err(e) => check("rank-six-one-two-two", false, e.to_string()),
        });
    }

    // The B refinement: type (1, k_e, 0, 0) with k_e <= 2 is disconnected.
    {
        let mut ok = true;
        let mut cases = 0usize;
        for n in [3usize, 4] {
            let Ok(family) = GroupFamily::new(FamilyTag::AffineB, n) else { continue };
            for d in enumerate_descriptors(family) {
                let ty = d.cycle_type();
                if ty.m == 1 && ty.k_o == 0 && ty.l == 0 && ty.k_e <= 2 {
                    cases += 1;
                    if !matches!(
                        predict_connectivity(&d),
                        Ok(ConnectivityVerdict::Disconnected { .. })
                    ) {
                        ok = false;
                    }
                }
            }
        }
        out.push(check("refinement-small-ke", ok, format!("{cases} classes")));
    }

    out
}

/// Check one disconnected class against its certificate.
fn verify_disconnection(
    d: &ClassDescriptor,
    certificate: CertificateKind,
    window: i64,
) -> Result<String> {
    let vertices = enumerate_class_window(d, window)?;
    match certificate {
        CertificateKind::IsolatedVertices => {
            for v in &vertices {
                if !neighbors_in_class(v, d, window)?.is_empty() {
                    return Err(Error::ClassMismatch);
                }
            }
            Ok(format!("{} isolated vertices", vertices.len()))
        }
        CertificateKind::ConservedOneCycle | CertificateKind::ConservedFixedPoint => {
            let mut values = std::collections::BTreeSet::new();
            for v in &vertices {
                let val = obstruction_value(v, d, certificate)?
                    .ok_or(Error::ClassMismatch)?;
                values.insert(val.clone());
                for nb in neighbors_in_class(v, d, window)? {
                    let nb_val = obstruction_value(&nb, d, certificate)?
                        .ok_or(Error::ClassMismatch)?;
                    if nb_val != val {
                        return Err(Error::ClassMismatch);
                    }
                }
            }
            if values.len() < 2 {
                return Err(Error::ClassMismatch);
            }
            Ok(format!("{} vertices, {} obstruction values", vertices.len(), values.len()))
        }
        CertificateKind::FiniteProjection => {
            // Component ids in the finite projection must be conserved, and
            // the projection must really be disconnected.
            let fam = crate::graph::finite_projection_family(d.family().tag());
            let fd = finite_class_of(&vertices[0].sigma, fam)?;
            let class = enumerate_finite_class(&fd);
            let comp = finite_components(&class)?;
            let id_of = |s: &SignedPermutation| -> usize {
                comp[class.iter().position(|p| p == s).unwrap()]
            };
            let distinct: std::collections::BTreeSet<usize> = comp.iter().copied().collect();
            if distinct.len() < 2 {
                return Err(Error::ClassMismatch);
            }
            for v in vertices.iter() {
                let vid = id_of(&v.sigma);
                for nb in neighbors_in_class(v, d, window)? {
                    if id_of(&nb.sigma) != vid {
                        return Err(Error::ClassMismatch);
                    }
                }
            }
            Ok(format!(
                "{} vertices, finite projection has {} components",
                vertices.len(),
                distinct.len()
            ))
        }
        CertificateKind::InheritedAmbient => {
            // Verified by the named rank-six reproduction.
            Ok(format!("{} vertices (inherited case)", vertices.len()))
        }
    }
}

fn finite_components(class: &[SignedPermutation]) -> Result<Vec<usize>> {
    let elements: Vec<AffineElement> = class
        .iter()
        .map(|p| AffineElement::new(p.clone(), vec![0; p.n()]).unwrap())
        .collect();
    let mut comp = vec![usize::MAX; class.len()];
    let mut next = 0usize;
    for start in 0..class.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..class.len() {
                if comp[j] == usize::MAX && j != i && commutes_oracle(&elements[i], &elements[j])? {
                    comp[j] = next;
                    queue.push_back(j);
                }
            }
        }
        next += 1;
    }
    Ok(comp)
}

/// The rank-six special case: the representative and a label-shifted twin of
/// the (1,2,2,0) class stay in different window components and no path shows
/// up under window expansion.
fn rank_six_reproduction(window: i64) -> Result<String> {
    let family = GroupFamily::new(FamilyTag::AffineC, 6).unwrap();
    let rep = parse_element("(+1 2)^0 (-3)^0 (-4)^0 (-5)^1 (-6)^1", 6).unwrap();
    let twin = parse_element("(+1 2)^0 (-3)^0 (-4)^0 (-5)^-1 (-6)^1", 6).unwrap();
    let d = class_of(&rep, family)?;
    if class_of(&twin, family)? != d {
        return Err(Error::ClassMismatch);
    }
    let comps = components_in_window(&d, WindowSpec::new(window))?;
    let find = |x: &AffineElement| comps.vertices.iter().position(|v| v == x);
    let (ri, ti) = (find(&rep).unwrap(), find(&twin).unwrap());
    if comps.component_of[ri] == comps.component_of[ti] {
        return Err(Error::ClassMismatch);
    }
    let probe = ClassSearcher::new(d).distance(&rep, &twin, 3, 400_000)?;
    if probe.is_some() {
        return Err(Error::ClassMismatch);
    }
    Ok(format!(
        "{} window vertices in {} components; no path within window 3",
        comps.vertices.len(),
        comps.component_count
    ))
}

// ---------------------------------------------------------------------------
// Suite: diameters (criterion 6 and the lower-bound consistency of 8)
// ---------------------------------------------------------------------------

fn diameters_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let rank_list = ranks(config, &[4, 5, 6]);

    // Witnessed distances within the predicted bound, 200 pairs per class.
    let tasks: Vec<ClassDescriptor> = rank_list
        .iter()
        .flat_map(|&n| families_at(n))
        .flat_map(|family| enumerate_descriptors(family))
        .filter(|d| {
            matches!(
                predict_connectivity(d),
                Ok(ConnectivityVerdict::ConnectedWithBound { .. })
            )
        })
        .collect();
    let results: Vec<(String, bool, String)> = tasks
        .par_iter()
        .map(|d| {
            let name = d.to_compact_text();
            match witnessed_distances(d, config.seed, 200) {
                Ok(details) => (name, true, details),
                Err(e) => (name, false, e.to_string()),
            }
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter(|r| !r.1).map(|r| &r.0).collect();
    out.push(check(
        "witnessed-diameters",
        failures.is_empty(),
        format!("{} connected classes; failures: {failures:?}", results.len()),
    ));

    // Constructive paths: 500 members per constructive case.
    let cases: [(&str, Vec<ClassDescriptor>); 4] = [
        ("p46-b", constructive_descriptors(&rank_list, |tag, ty| {
            matches!(tag, FamilyTag::AffineB | FamilyTag::AffineBbar)
                && ty.k_e == 0
                && ty.k_o == 0
                && ty.l == 0
        })),
        ("p46-d", constructive_descriptors(&rank_list, |tag, ty| {
            tag == FamilyTag::AffineD && ty.k_e == 0 && ty.k_o == 0 && ty.l == 0
        })),
        ("p47", constructive_descriptors(&rank_list, |tag, ty| {
            tag == FamilyTag::AffineB && ty.m == 1 && ty.k_e > 2 && ty.k_o == 0 && ty.l == 0
        })),
        ("p48", constructive_descriptors(&rank_list, |tag, ty| {
            tag == FamilyTag::AffineB && ty.m > 1 && ty.k_e >= 2 && ty.k_o == 0 && ty.l == 0
        })),
    ];
    for (case_name, descriptors) in cases {
        if descriptors.is_empty() {
            continue;
        }
        let per_class = (500 / descriptors.len()).max(1);
        let results: Vec<(bool, String)> = descriptors
            .par_iter()
            .map(|d| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ hash_name(&d.to_compact_text()));
                let pool = match enumerate_class_window(d, 2) {
                    Ok(p) => p,
                    Err(e) => return (false, e.to_string()),
                };
                let (bound, _) = diameter_bound(d);
                let mut worst = 0usize;
                for _ in 0..per_class {
                    let x = pool.choose(&mut rng).unwrap();
                    match constructive_path(x, d) {
                        Ok(w) => {
                            if w.validate().is_err() || w.length() > bound {
                                return (
                                    false,
                                    format!("{}: length {} vs bound {bound}", d, w.length()),
                                );
                            }
                            worst = worst.max(w.length());
                        }
                        Err(e) => return (false, format!("{d}: {e}")),
                    }
                }
                (true, format!("{d}: worst {worst} <= {bound}"))
            })
            .collect();
        let failed: Vec<&String> = results.iter().filter(|r| !r.0).map(|r| &r.1).collect();
        out.push(check(
            &format!("constructive-{case_name}"),
            failed.is_empty(),
            if failed.is_empty() {
                format!("{} classes x {per_class} members", results.len())
            } else {
                format!("failures: {failed:?}")
            },
        ));
    }

    out
}

fn constructive_descriptors(
    rank_list: &[usize],
    pred: impl Fn(FamilyTag, LabelledCycleType) -> bool,
) -> Vec<ClassDescriptor> {
    rank_list
        .iter()
        .flat_map(|&n| families_at(n))
        .flat_map(|family| enumerate_descriptors(family))
        .filter(|d| pred(d.family().tag(), d.cycle_type()))
        .collect()
}

fn hash_name(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn witnessed_distances(d: &ClassDescriptor, seed: u64, pairs: usize) -> Result<String> {
    let (bound, _) = diameter_bound(d);
    let pool = enumerate_class_window(d, 1)?;
    if pool.len() < 2 {
        return Ok("window too small for pairs".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ hash_name(&d.to_compact_text()));
    let mut searcher = ClassSearcher::new(*d);
    let mut worst = 0usize;
    for _ in 0..pairs {
        let x = pool.choose(&mut rng).unwrap();
        let y = pool.choose(&mut rng).unwrap();
        let cert = searcher
            .distance(x, y, 1 + bound as i64, 4_000_000)?
            .ok_or(Error::ClassMismatch)?;
        if cert.witness.length() > bound {
            return Err(Error::BudgetExceeded { nodes: cert.witness.length(), cap: bound });
        }
        if let Some(lb) = cert.finite_lower_bound {
            if lb > cert.witness.length() {
                return Err(Error::ClassMismatch);
            }
        }
        worst = worst.max(cert.witness.length());
    }
    Ok(format!("{pairs} pairs, worst distance {worst} <= {bound}"))
}

// ---------------------------------------------------------------------------
// Suite: finite baselines (criterion 7)
// ---------------------------------------------------------------------------

fn finite_baseline_checks(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let rank_list = ranks(config, &[2, 3, 4, 5, 6]);

    let mut failures = Vec::new();
    let mut cases = 0usize;
    for &n in &rank_list {
        for family in [FiniteFamily::FiniteA, FiniteFamily::FiniteB, FiniteFamily::FiniteD] {
            if family == FiniteFamily::FiniteD && n < 4 {
                continue;
            }
            for d in finite_descriptors(family, n) {
                cases += 1;
                let summary = match finite_class_graph_summary(&d) {
                    Ok(s) => s,
                    Err(e) => {
                        failures.push(format!("{d:?}: {e}"));
                        continue;
                    }
                };
                let ConnectivityVerdict::FiniteBaseline(v) = crate::graph::predict_finite(&d)
                else {
                    unreachable!()
                };
                let mut ok = true;
                if v.disconnected {
                    ok &= !summary.connected || summary.size <= 1;
                } else {
                    ok &= summary.connected;
                    if v.complete {
                        ok &= summary.complete || summary.size <= 1;
                    }
                    if let Some(exact) = v.diameter_exact {
                        ok &= summary.diameter == Some(exact) || summary.size <= 1;
                    } else if let Some(bound) = v.diameter_bound {
                        ok &= summary.diameter.map_or(false, |diam| diam <= bound);
                    }
                }
                if !ok {
                    failures.push(format!("{d:?}: predicted {v:?}, got {summary:?}"));
                }
            }
        }
    }
    out.push(check(
        "finite-baselines",
        failures.is_empty(),
        format!("{cases} finite classes; failures: {failures:?}"),
    ));

    // Lemma-style lower bound spot check: distance of projections never
    // exceeds an affine witness (probed on small certified paths).
    {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xf1f1);
        let mut failures = 0usize;
        let mut cases = 0usize;
        for _ in 0..50 {
            let n = rng.gen_range(4..=5);
            let family = GroupFamily::new(FamilyTag::AffineC, n).unwrap();
            let x = random_involution(n, 1, &mut rng);
            let d = class_of(&x, family).unwrap();
            let pool = enumerate_class_window(&d, 1).unwrap();
            let y = pool.choose(&mut rng).unwrap();
            if let Ok(Some(cert)) =
                ClassSearcher::new(d).distance(&x, y, 3, 200_000)
            {
                cases += 1;
                if let Some(lb) = cert.finite_lower_bound {
                    if lb > cert.witness.length() {
                        failures += 1;
                    }
                }
            }
        }
        out.push(check(
            "projection-lower-bound",
            failures == 0,
            format!("{cases} probed distances, {failures} violations"),
        ));
    }

    out
}

fn finite_descriptors(family: FiniteFamily, n: usize) -> Vec<FiniteClassDescriptor> {
    let mut out = Vec::new();
    for m in 0..=n / 2 {
        for k in 0..=n - 2 * m {
            let l = n - 2 * m - k;
            if m == 0 && k == 0 {
                continue; // identity
            }
            match family {
                FiniteFamily::FiniteA => {
                    if k == 0 {
                        out.push(FiniteClassDescriptor { family, n, m, k, l, minus_mod4: None });
                    }
                }
                FiniteFamily::FiniteB => {
                    out.push(FiniteClassDescriptor { family, n, m, k, l, minus_mod4: None });
                }
                FiniteFamily::FiniteD => {
                    if k % 2 != 0 {
                        continue;
                    }
                    if k == 0 && l == 0 {
                        for r in [0u8, 2] {
                            out.push(FiniteClassDescriptor {
                                family,
                                n,
                                m,
                                k,
                                l,
                                minus_mod4: Some(r),
                            });
                        }
                    } else {
                        out.push(FiniteClassDescriptor { family, n, m, k, l, minus_mod4: None });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(
            run_suite("nope", &VerifyConfig::default()),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn suite_reports_are_deterministic() {
        let config = VerifyConfig { seed: 7, rank_filter: Some(4), window: 1 };
        let a = run_suite("finite-baseline", &config).unwrap();
        let b = run_suite("finite-baseline", &config).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
