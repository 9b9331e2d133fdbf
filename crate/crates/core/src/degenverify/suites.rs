//! Named verification suites over a type, a rank, markings and weights.

use serde_json::{json, Value};

use super::typec::{self, degrees_up_to, RankContext};
use super::{run_all, run_case, typeb, Report};
use crate::liealg::{LieType, Realization};
use crate::poset::{bits, OSet, PosetP};

pub const SUITES_C: &[&str] = &[
    "counts",
    "initialD",
    "intermediate",
    "tildeinitial",
    "degenmainC",
    "mainbasisC",
    "tableaux",
    "characterC",
];
pub const SUITES_B: &[&str] = &[
    "essentialB",
    "ejd",
    "baseB",
    "pyB",
    "degenmainB",
    "characterB",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub ty: LieType,
    pub n: usize,
    pub markings: Vec<OSet>,
    /// Overrides the per-suite default weights.
    pub lambdas: Option<Vec<Vec<u32>>>,
    /// Forces ideal certificates on or off; default is on for `n ≤ 2`.
    pub certify: Option<bool>,
}

/// Non-forced part of a marking as `(i,j),…`.
pub fn marking_label(p: &PosetP, o: &OSet) -> String {
    let free = o.mask & !p.diagonal_mask();
    bits(free)
        .map(|k| p.element(k).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn fundamentals(n: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|k| (0..n).map(|c| (c == k) as u32).collect())
        .collect()
}

fn unit_last(n: usize, first: u32, last: u32) -> Vec<u32> {
    let mut a = vec![0; n];
    a[0] += first;
    a[n - 1] += last;
    a
}

fn default_lambdas(suite: &str, n: usize) -> Vec<Vec<u32>> {
    match suite {
        "counts" => degrees_up_to(n, 3),
        "essentialB" if n <= 2 => degrees_up_to(n, 3),
        "essentialB" => {
            let mut v = fundamentals(n);
            v.push(unit_last(n, 0, 2));
            v
        }
        "pyB" | "degenmainB" => {
            let mut v: Vec<Vec<u32>> =
                vec![unit_last(n, 1, 0), unit_last(n, 0, 2), unit_last(n, 1, 2)];
            v.retain(|a| a[n - 1] % 2 == 0);
            v.sort();
            v.dedup();
            v
        }
        _ => degrees_up_to(n, 2),
    }
}

fn max_rank(suite: &str) -> usize {
    match suite {
        "ejd" => 4,
        "tableaux" | "tildeinitial" | "pyB" | "degenmainB" => 2,
        _ => 3,
    }
}

pub fn suites_for(ty: LieType) -> &'static [&'static str] {
    match ty {
        LieType::C => SUITES_C,
        LieType::B => SUITES_B,
    }
}

type Job<'a> = Box<dyn Fn() -> Report + Sync + Send + 'a>;

/// Runs one suite, or every suite of the type for `"all"` (skipping those
/// whose rank bound is exceeded).
pub fn run_suite(cfg: &SuiteConfig, suite: &str) -> Result<Vec<Report>, String> {
    let names: Vec<&str> = if suite == "all" {
        suites_for(cfg.ty)
            .iter()
            .copied()
            .filter(|s| cfg.n <= max_rank(s))
            .collect()
    } else if suites_for(cfg.ty).contains(&suite) {
        if cfg.n > max_rank(suite) {
            return Err(format!("suite {suite} supports n <= {}", max_rank(suite)));
        }
        vec![suite]
    } else {
        return Err(format!("unknown suite {suite} for this type"));
    };
    if cfg.n == 0 {
        return Err("n must be positive".into());
    }
    if let Some(ls) = &cfg.lambdas {
        if ls.iter().any(|a| a.len() != cfg.n) {
            return Err(format!("weights must have {} coefficients", cfg.n));
        }
    }
    let p = PosetP::build(cfg.n).map_err(|e| e.to_string())?;
    let real = Realization::new(cfg.ty, cfg.n).map_err(|e| e.to_string())?;
    let certify = cfg.certify.unwrap_or(cfg.n <= 2);
    let needs_ideals = names
        .iter()
        .any(|s| matches!(*s, "tildeinitial" | "tableaux"))
        || (names.contains(&"degenmainC") && certify)
        || (names.contains(&"intermediate") && cfg.n <= 2);
    let ctx = match cfg.ty {
        LieType::C => Some(RankContext::new(cfg.n, needs_ideals)?),
        LieType::B => None,
    };
    let gb_i = ctx.as_ref().and_then(|c| {
        if names.contains(&"tableaux") {
            typec::gb_of_i(c)
        } else {
            None
        }
    });
    let ty = match cfg.ty {
        LieType::C => "C",
        LieType::B => "B",
    };
    let n = cfg.n;
    let mut jobs: Vec<Job> = Vec::new();
    for &name in &names {
        let lambdas = cfg
            .lambdas
            .clone()
            .unwrap_or_else(|| default_lambdas(name, n));
        let case_o = |o: &OSet| json!({"type": ty, "n": n, "O": marking_label(&p, o)});
        let case_ol = |o: &OSet, a: &[u32]| json!({"type": ty, "n": n, "O": marking_label(&p, o), "lambda": a});
        match name {
            "intermediate" | "tildeinitial" | "ejd" => {
                let ctx = ctx.as_ref();
                jobs.push(Box::new(move || {
                    run_case(name, json!({"type": ty, "n": n}), || match name {
                        "intermediate" => typec::verify_intermediate(ctx.expect("type C")),
                        "tildeinitial" => typec::verify_tilde_initial(ctx.expect("type C")),
                        _ => typeb::verify_ejd(n),
                    })
                }));
            }
            "initialD" | "degenmainC" | "baseB" => {
                for o in &cfg.markings {
                    let (ctx, p, real, case) = (ctx.as_ref(), &p, &real, case_o(o));
                    jobs.push(Box::new(move || {
                        run_case(name, case.clone(), || match name {
                            "initialD" => typec::verify_initial_d(ctx.expect("type C"), o),
                            "degenmainC" => {
                                typec::verify_degenmain_c(ctx.expect("type C"), o, 2, certify)
                            }
                            _ => typeb::verify_base_b(real, p, o),
                        })
                    }));
                }
            }
            _ => {
                for o in &cfg.markings {
                    for a in &lambdas {
                        let (ctx, p, real, gb_i, case) =
                            (ctx.as_ref(), &p, &real, gb_i.as_ref(), case_ol(o, a));
                        let a = a.clone();
                        jobs.push(Box::new(move || {
                            run_case(name, case.clone(), || match name {
                                "counts" => typec::lattice_count(p, o, &a),
                                "mainbasisC" => typec::verify_mainbasis_c(real, p, o, &a),
                                "characterC" => typec::character_check_c(real, p, o, &a),
                                "tableaux" => typec::standard_tableaux(
                                    ctx.expect("type C"),
                                    o,
                                    &a,
                                    gb_i.expect("ideal built"),
                                ),
                                "essentialB" => typeb::verify_essential_b(real, p, o, &a),
                                "characterB" => typeb::character_check_b(real, p, o, &a),
                                "pyB" => typeb::p_polynomials(real, p, o, &a)
                                    .map(|d| json!({"polys": d.polys.len()})),
                                _ => typeb::verify_degenmain_b(real, p, o, &a, certify),
                            })
                        }));
                    }
                }
            }
        }
    }
    Ok(run_all(&jobs, |job| job()))
}

/// Summary line counts: passed, failed.
pub fn tally(reports: &[Report]) -> (usize, usize) {
    let passed = reports.iter().filter(|r| r.passed()).count();
    (passed, reports.len() - passed)
}

pub fn reports_json(reports: &[Report]) -> Value {
    serde_json::to_value(reports).expect("serializable")
}
