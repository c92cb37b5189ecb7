//! Named property checks over seeded random instances. Each check is a
//! `Check` registered by name; `CheckRegistry::run` executes them in
//! registration order. Instances run in parallel but results are collected
//! by index, so a report depends only on the seed and the configuration.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{Atom, Prime, TameGroup};
use crate::complexes::{tower_oracle, FreeComplex, DEFAULT_STAGES};
use crate::presheaf::{complete_sectionwise, li_sectionwise_check};
use crate::random::{self, instance_rng, ComplexParams, SUITE_PRIMES};
use crate::tstructure::{is_in_p_heart, pi_p, FormalSpectrum};
use crate::unstable::{complete_em, complete_space, postnikov_limit_check, FormalSpace, UnstableError};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub stages: usize,
    pub complexes: usize,
    pub tame_sums: usize,
    pub spaces: usize,
    pub presheaves: usize,
    pub poset_size: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            stages: DEFAULT_STAGES,
            complexes: 200,
            tame_sums: 500,
            spaces: 100,
            presheaves: 20,
            poset_size: 4,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        SuiteConfig {
            seed,
            ..Self::default()
        }
    }

    /// Sub-seed for one check so checks draw independent instances.
    fn stream(&self, salt: u64) -> u64 {
        self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }

    fn complex(&self, i: usize) -> FreeComplex {
        random::complex(&mut instance_rng(self.stream(1), i as u64), ComplexParams::default())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub description: String,
    pub instances: usize,
    pub passed: usize,
    /// Instances not counted in the pass denominator, with the reason.
    pub excluded: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl CheckOutcome {
    fn from_results(check: &dyn Check, results: Vec<Result<(), String>>) -> Self {
        let instances = results.len();
        let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
        CheckOutcome {
            name: check.name().into(),
            description: check.description().into(),
            instances,
            passed: instances - failures.len(),
            excluded: 0,
            pass: failures.is_empty(),
            failures,
            notes: Vec::new(),
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome;
}

fn prime(q: u64) -> Prime {
    Prime::new(q).expect("suite primes are prime")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `f` on every complex of the shared complex suite and every suite prime.
fn over_complexes(
    cfg: &SuiteConfig,
    f: impl Fn(&FreeComplex, Prime) -> Result<(), String> + Sync,
) -> Vec<Result<(), String>> {
    (0..cfg.complexes)
        .into_par_iter()
        .flat_map_iter(|i| {
            let c = cfg.complex(i);
            SUITE_PRIMES
                .iter()
                .map(|&q| f(&c, prime(q)).map_err(|e| format!("complex #{i} at p={q}: {e}")))
                .collect::<Vec<_>>()
        })
        .collect()
}

struct OracleEquivalence;

impl Check for OracleEquivalence {
    fn name(&self) -> &'static str {
        "oracle-equivalence"
    }

    fn description(&self) -> &'static str {
        "symbolic completion equals the tower limit on random complexes"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let results = over_complexes(cfg, |c, p| {
            let a = c.complete(p).map_err(|e| e.to_string())?;
            let b = tower_oracle(c, p, cfg.stages).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("symbolic {a} vs tower {b}"))
        });
        CheckOutcome::from_results(self, results)
    }
}

struct ZeroCompletion;

impl Check for ZeroCompletion {
    fn name(&self) -> &'static str {
        "zero-completion"
    }

    fn description(&self) -> &'static str {
        "completion vanishes iff E//p is acyclic iff homology is uniquely p-divisible"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let results = over_complexes(cfg, |c, p| {
            let zero = c.complete(p).map_err(|e| e.to_string())?.is_zero();
            let acyclic = c.cone_mult(&BigInt::from(p.get())).is_acyclic();
            let mut upd = true;
            for n in c.degrees() {
                let h = c.homology(n).map_err(|e| e.to_string())?;
                upd &= h
                    .divisibility_profile(p)
                    .map_err(|e| e.to_string())?
                    .uniquely_p_divisible;
            }
            ensure(zero == acyclic && acyclic == upd, || {
                format!("completion zero {zero}, E//p acyclic {acyclic}, uniquely divisible {upd}")
            })
        });
        CheckOutcome::from_results(self, results)
    }
}

/// `pi_p` middles of the homology spectrum, degree by degree.
fn ses_middles(c: &FreeComplex, p: Prime) -> Result<Vec<(i64, TameGroup)>, String> {
    let e = FormalSpectrum::new(c.graded_homology().map_err(|e| e.to_string())?);
    (c.lo()..=c.hi() + 1)
        .map(|n| {
            let r = pi_p(&e, p, n).map_err(|e| e.to_string())?;
            let m = r
                .middle_known
                .ok_or_else(|| format!("degree {n}: unresolved 0 -> {} -> ? -> {} -> 0", r.left, r.right))?;
            Ok((n, m))
        })
        .collect()
}

struct SesConsistency;

impl Check for SesConsistency {
    fn name(&self) -> &'static str {
        "ses-consistency"
    }

    fn description(&self) -> &'static str {
        "pi_p middles of the homology spectrum equal the completion of the complex"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let results = over_complexes(cfg, |c, p| {
            let comp = c.complete(p).map_err(|e| e.to_string())?;
            for (n, m) in ses_middles(c, p)? {
                ensure(comp.get(n) == m, || {
                    format!("degree {n}: pi_p middle {m} vs {}", comp.get(n))
                })?;
            }
            Ok(())
        });
        CheckOutcome::from_results(self, results)
    }
}

struct L1ModP;

impl Check for L1ModP {
    fn name(&self) -> &'static str {
        "l1-mod-p"
    }

    fn description(&self) -> &'static str {
        "0 -> (L1 A)/p -> A[p] -> (L0 A)[p] -> 0 bookkeeping on atoms and random sums"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let mut groups: Vec<TameGroup> = Vec::new();
        for q in SUITE_PRIMES {
            let q = prime(q);
            for a in [
                Atom::Free,
                Atom::Cyclic { prime: q, exp: 2 },
                Atom::Prufer(q),
                Atom::Rationals,
                Atom::PadicInts(q),
                Atom::InvertedInt(q),
            ] {
                groups.push(TameGroup::atom(a));
            }
        }
        let seed = cfg.stream(4);
        groups.extend((0..cfg.tame_sums).map(|i| random::tame_group(&mut instance_rng(seed, i as u64), 6)));
        let results = groups
            .par_iter()
            .flat_map_iter(|g| {
                SUITE_PRIMES.iter().map(move |&q| {
                    g.l1_mod_p_sequence(prime(q))
                        .and_then(|w| w.verify(prime(q)))
                        .map_err(|e| format!("{g} at p={q}: {e}"))
                })
            })
            .collect();
        CheckOutcome::from_results(self, results)
    }
}

struct PruferShift;

impl Check for PruferShift {
    fn name(&self) -> &'static str {
        "prufer-shift"
    }

    fn description(&self) -> &'static str {
        "K(Prufer(p), n) completes to K(Zp(p), n+1); K(Q, n) completes to a point"
    }

    fn run(&self, _cfg: &SuiteConfig) -> CheckOutcome {
        let mut results = Vec::new();
        for q in [2u64, 3] {
            let p = prime(q);
            for n in 2..=4 {
                let got = complete_em(&TameGroup::atom(Atom::Prufer(p)), n, p);
                let want = FormalSpace::em(TameGroup::atom(Atom::PadicInts(p)), n + 1);
                results.push(match (got, want) {
                    (Ok(g), Ok(w)) => ensure(g == w, || format!("K(Prufer({q}), {n}) -> {g}")),
                    (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
                });
                results.push(match complete_em(&TameGroup::atom(Atom::Rationals), n, p) {
                    Ok(g) => ensure(g.is_point(), || format!("K(Q, {n}) -> {g} at p={q}")),
                    Err(e) => Err(e.to_string()),
                });
            }
        }
        CheckOutcome::from_results(self, results)
    }
}

/// Share of resolvable instances required by the Postnikov check.
pub const RESOLVABLE_THRESHOLD: f64 = 0.8;

struct PostnikovLimit;

impl Check for PostnikovLimit {
    fn name(&self) -> &'static str {
        "postnikov-limit"
    }

    fn description(&self) -> &'static str {
        "completion of a 3-stage space equals the limit of completed truncations"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let seed = cfg.stream(6);
        let raw: Vec<Option<Result<(), String>>> = (0..cfg.spaces)
            .into_par_iter()
            .map(|i| {
                let mut rng = instance_rng(seed, i as u64);
                let x = random::formal_space(&mut rng, 3);
                let q = random::suite_prime(&mut rng);
                match postnikov_limit_check(&x, q) {
                    Ok(true) => Some(Ok(())),
                    Ok(false) => Some(Err(format!("space #{i} {x} at p={q}"))),
                    Err(UnstableError::UnresolvedExtension { .. }) => None,
                    Err(e) => Some(Err(format!("space #{i} {x}: {e}"))),
                }
            })
            .collect();
        let excluded = raw.iter().filter(|r| r.is_none()).count();
        let mut out = CheckOutcome::from_results(self, raw.into_iter().flatten().collect());
        let share = if cfg.spaces == 0 {
            1.0
        } else {
            (cfg.spaces - excluded) as f64 / cfg.spaces as f64
        };
        out.excluded = excluded;
        out.notes.push(format!(
            "resolvable {}/{} ({:.1}%), threshold {:.0}%",
            cfg.spaces - excluded,
            cfg.spaces,
            100.0 * share,
            100.0 * RESOLVABLE_THRESHOLD
        ));
        out.pass &= share >= RESOLVABLE_THRESHOLD;
        out
    }
}

struct Truncatedness;

impl Check for Truncatedness {
    fn name(&self) -> &'static str {
        "truncatedness"
    }

    fn description(&self) -> &'static str {
        "completion of an object supported in degrees <= k is supported in degrees <= k+1"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let mut results = over_complexes(cfg, |c, p| {
            let comp = c.complete(p).map_err(|e| e.to_string())?;
            let k = c.hi();
            ensure(comp.support().is_none_or(|(_, top)| top <= k + 1), || {
                format!("supported in degrees <= {k} but completion is {comp}")
            })
        });
        let seed = cfg.stream(6);
        results.extend(
            (0..cfg.spaces)
                .into_par_iter()
                .map(|i| {
                    let mut rng = instance_rng(seed, i as u64);
                    let x = random::formal_space(&mut rng, 3);
                    let q = random::suite_prime(&mut rng);
                    let k = x.top_degree().unwrap_or(2);
                    match complete_space(&x, q) {
                        Ok(c) => ensure(c.top_degree().is_none_or(|t| t <= k + 1), || {
                            format!("space #{i} {x} completes to {c}")
                        }),
                        Err(UnstableError::UnresolvedExtension { .. }) => Ok(()),
                        Err(e) => Err(e.to_string()),
                    }
                })
                .collect::<Vec<_>>(),
        );
        CheckOutcome::from_results(self, results)
    }
}

struct HeartPredicates;

impl Check for HeartPredicates {
    fn name(&self) -> &'static str {
        "heart-predicates"
    }

    fn description(&self) -> &'static str {
        "resolved pi_p middles lie in the p-adic heart; Z, Q, Prufer(p) do not"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let mut results = over_complexes(cfg, |c, p| {
            for (n, m) in ses_middles(c, p)? {
                let e = FormalSpectrum::concentrated(m.clone(), 0);
                ensure(is_in_p_heart(&e, p).map_err(|e| e.to_string())?, || {
                    format!("middle {m} of degree {n} is not in the heart")
                })?;
            }
            Ok(())
        });
        let seed = cfg.stream(8);
        results.extend(
            (0..cfg.tame_sums)
                .into_par_iter()
                .map(|i| {
                    let mut rng = instance_rng(seed, i as u64);
                    let e = FormalSpectrum::new((-1..3).map(|n| (n, random::tame_group(&mut rng, 3))).collect());
                    let q = random::suite_prime(&mut rng);
                    for n in -1..=3 {
                        let r = pi_p(&e, q, n).map_err(|e| e.to_string())?;
                        if let Some(m) = r.middle_known {
                            let h = FormalSpectrum::concentrated(m.clone(), 0);
                            ensure(is_in_p_heart(&h, q).map_err(|e| e.to_string())?, || {
                                format!("spectrum #{i} {e}: middle {m} in degree {n} is not in the heart at p={q}")
                            })?;
                        }
                    }
                    Ok(())
                })
                .collect::<Vec<_>>(),
        );
        for q in SUITE_PRIMES {
            let p = prime(q);
            for a in [Atom::Free, Atom::Rationals, Atom::Prufer(p)] {
                let e = FormalSpectrum::concentrated(TameGroup::atom(a), 0);
                results.push(match is_in_p_heart(&e, p) {
                    Ok(inside) => ensure(!inside, || format!("{a} in degree 0 is in the heart at p={q}")),
                    Err(e) => Err(e.to_string()),
                });
            }
        }
        CheckOutcome::from_results(self, results)
    }
}

struct Sectionwise;

impl Check for Sectionwise {
    fn name(&self) -> &'static str {
        "sectionwise"
    }

    fn description(&self) -> &'static str {
        "sectionwise completion commutes with restriction to down-closed subsets; L_i is sectionwise"
    }

    fn run(&self, cfg: &SuiteConfig) -> CheckOutcome {
        let seed = cfg.stream(9);
        let results = (0..cfg.presheaves)
            .into_par_iter()
            .map(|i| {
                let mut rng = instance_rng(seed, i as u64);
                let f = random::presheaf(&mut rng, cfg.poset_size);
                let q = random::suite_prime(&mut rng);
                let tag = |e: String| format!("presheaf #{i} at p={q}: {e}");
                let c = complete_sectionwise(&f, q).map_err(|e| tag(e.to_string()))?;
                for s in f.poset().down_closed_subsets() {
                    let lhs = f
                        .restrict_to(&s)
                        .and_then(|g| complete_sectionwise(&g, q))
                        .map_err(|e| tag(e.to_string()))?;
                    let rhs = c.restrict_to(&s).map_err(|e| tag(e.to_string()))?;
                    ensure(lhs == rhs, || tag(format!("restriction to {s:?} does not commute")))?;
                }
                for k in [0, 1] {
                    let ok = li_sectionwise_check(&f, q, k).map_err(|e| tag(e.to_string()))?;
                    ensure(ok, || tag(format!("L_{k} is not sectionwise")))?;
                }
                Ok(())
            })
            .collect();
        CheckOutcome::from_results(self, results)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }
}

/// Failure lines shown per check in the text report.
const SHOWN_FAILURES: usize = 5;

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "suite seed {} stages {} complexes {} tame sums {} spaces {} presheaves {}",
            c.seed, c.stages, c.complexes, c.tame_sums, c.spaces, c.presheaves
        )?;
        for o in &self.outcomes {
            let counted = o.instances;
            writeln!(
                f,
                "{:<4} {:<20} {:>5}/{:<5} {}",
                if o.pass { "PASS" } else { "FAIL" },
                o.name,
                o.passed,
                counted,
                o.description
            )?;
            for n in &o.notes {
                writeln!(f, "     note: {n}")?;
            }
            for e in o.failures.iter().take(SHOWN_FAILURES) {
                writeln!(f, "     failure: {e}")?;
            }
            if o.failures.len() > SHOWN_FAILURES {
                writeln!(f, "     ... {} more failures", o.failures.len() - SHOWN_FAILURES)?;
            }
        }
        write!(
            f,
            "{}",
            if self.all_passed() {
                "all checks passed"
            } else {
                "some checks failed"
            }
        )
    }
}

pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        CheckRegistry { checks: Vec::new() }
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.iter().map(|c| c.name())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    /// Runs the named checks, or all of them when `only` is empty.
    pub fn run(&self, cfg: &SuiteConfig, only: &[String]) -> Result<SuiteReport, String> {
        for name in only {
            if self.get(name).is_none() {
                return Err(format!(
                    "unknown check {name}; known: {}",
                    self.names().collect::<Vec<_>>().join(", ")
                ));
            }
        }
        let outcomes = self
            .checks
            .iter()
            .filter(|c| only.is_empty() || only.iter().any(|n| n == c.name()))
            .map(|c| c.run(cfg))
            .collect();
        Ok(SuiteReport {
            config: cfg.clone(),
            outcomes,
        })
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = CheckRegistry::empty();
        r.register(Box::new(OracleEquivalence));
        r.register(Box::new(ZeroCompletion));
        r.register(Box::new(SesConsistency));
        r.register(Box::new(L1ModP));
        r.register(Box::new(PruferShift));
        r.register(Box::new(PostnikovLimit));
        r.register(Box::new(Truncatedness));
        r.register(Box::new(HeartPredicates));
        r.register(Box::new(Sectionwise));
        r
    }
}
