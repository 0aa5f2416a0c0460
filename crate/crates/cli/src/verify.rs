//! The `verify` invariant suite: duality, almost-grading, cocycle
//! conditions, super-Jacobi, Poisson identities, Clifford relations,
//! central charge and Lax closure on the configured geometry.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use knalg::algebras::{CurrentAlgebra, DiffOpAlgebra, FiniteLieAlgebra, LieAlgebra, SuperAlgebra};
use knalg::cocycles::{certify, Cocycle, CocycleKind, CocycleSpec};
use knalg::exactnum::{Gr, HalfInteger};
use knalg::fock::{central_charge, slot_window, witt_generator, FockSpace, FockVector, WedgeMonomial};
use knalg::forms::{poisson_defects, FormSum, MeromorphicForm};
use knalg::geometry::separating_cycle;
use knalg::knbasis::{degrees_in, grading_bounds, GradedIndex, KnBasis, OpKind};
use knalg::lax::{close_check, LaxType};

use crate::config::{csv_row, CliError, RunConfig};

type SuiteResult = Result<String, String>;

fn h(n: i64) -> HalfInteger {
    HalfInteger::from_int(n)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn duality(b: &KnBasis, lo: i64, hi: i64) -> SuiteResult {
    let mut count = 0;
    for lt in [-2i64, -1, 0, 1, 2, 4] {
        let lam = HalfInteger::from_twice(lt);
        let degrees = degrees_in(lam, h(lo), h(hi));
        for &n in &degrees {
            for &m in &degrees {
                for p in 1..=b.k() {
                    for r in 1..=b.k() {
                        let f = b.form(&GradedIndex { weight: lam, degree: n, point: p }).map_err(|e| e.to_string())?;
                        let g = b.form(&GradedIndex { weight: -lam + 1, degree: -m, point: r }).map_err(|e| e.to_string())?;
                        let v = b.pairing(&f, &g).map_err(|e| e.to_string())?;
                        let want = if n == m && p == r { Gr::one() } else { Gr::zero() };
                        check(v == want, || format!("λ={lam} ({n},{p}) vs ({m},{r}): {v}"))?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} pairings"))
}

fn almost_grading(b: &KnBasis, lo: i64, hi: i64) -> SuiteResult {
    let mut out = Vec::new();
    for (lam, nu, op) in [
        (h(-1), h(-1), OpKind::Bracket),
        (h(0), h(0), OpKind::Product),
        (h(0), h(-1), OpKind::Product),
    ] {
        let t = b.structure_constants(lam, nu, op, h(lo), h(hi)).map_err(|e| e.to_string())?;
        let gb = grading_bounds(&t).map_err(|e| e.to_string())?;
        check(gb.lower_shift == 0, || format!("({lam},{nu}) {op}: lower shift {}", gb.lower_shift))?;
        if b.k() == 1 {
            check(gb.upper_shift == 0, || format!("({lam},{nu}) {op}: upper shift {} on one point", gb.upper_shift))?;
        }
        let bad = t.leading_term_mismatches();
        check(bad.is_empty(), || format!("({lam},{nu}) {op}: {} leading-term mismatches", bad.len()))?;
        out.push(format!("({lam},{nu}) {op} R={}", gb.upper_shift));
    }
    Ok(out.join(", "))
}

fn certify_on<A: LieAlgebra, C: Cocycle<A>>(alg: &A, c: &C, lo: i64, hi: i64) -> Result<usize, String> {
    let basis = alg.basis_in_window(h(lo), HalfInteger::from_twice(2 * hi + 1));
    certify(alg, c, &basis).map_err(|e| e.to_string())
}

fn cocycles(cfg: &RunConfig, b: &Arc<KnBasis>, lo: i64, hi: i64) -> SuiteResult {
    let cycle = cfg.cycle.clone().unwrap_or_else(|| separating_cycle(cfg.sphere()));
    let spec = |k| CocycleSpec::new(k, &cfg.geometry, cycle.clone()).map_err(|e| e.to_string());
    let d1 = DiffOpAlgebra { basis: b.clone() };
    let mut triples = 0;
    for k in [CocycleKind::Psi1, CocycleKind::Psi3, CocycleKind::Psi4] {
        triples += certify_on(&d1, &spec(k)?, lo, hi).map_err(|e| format!("{k}: {e}"))?;
    }
    let cur = CurrentAlgebra { basis: b.clone(), g: Arc::new(FiniteLieAlgebra::sl2()) };
    triples += certify_on(&cur, &spec(CocycleKind::Psi2)?, lo, hi).map_err(|e| format!("psi2: {e}"))?;
    let sup = SuperAlgebra { basis: b.clone() };
    triples += certify_on(&sup, &spec(CocycleKind::SuperPhi)?, lo, hi).map_err(|e| format!("phi: {e}"))?;
    Ok(format!("{triples} triples"))
}

fn super_jacobi(b: &Arc<KnBasis>, lo: i64, hi: i64) -> SuiteResult {
    let sup = SuperAlgebra { basis: b.clone() };
    let elems: Vec<_> = sup
        .basis_in_window(h(lo), HalfInteger::from_twice(2 * hi + 1))
        .into_iter()
        .map(|v| v.element)
        .collect();
    let n = elems.len();
    let bad = (0..n).into_par_iter().find_map_first(|i| {
        for j in i..n {
            for k in j..n {
                match sup.jacobi_defect(&elems[i], &elems[j], &elems[k]) {
                    Ok(d) if sup.is_zero(&d) => {}
                    _ => return Some(format!("defect at basis triple ({i},{j},{k})")),
                }
            }
        }
        None
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(format!("{} triples", n * (n + 1) * (n + 2) / 6)),
    }
}

fn poisson(b: &KnBasis, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_form = || {
        let w = HalfInteger::from_twice([-2i64, -1, 0, 2][rng.gen_range(0..4)]);
        let degrees = degrees_in(w, h(-2), h(2));
        let mut f = MeromorphicForm::zero(w);
        for _ in 0..rng.gen_range(1..=2) {
            let idx = GradedIndex {
                weight: w,
                degree: degrees[rng.gen_range(0..degrees.len())],
                point: rng.gen_range(1..=b.k()),
            };
            let c = Gr::gaussian(rng.gen_range(-3..=3), rng.gen_range(-1..=1));
            f = f.add(&b.form(&idx).expect("valid index").scale(&c));
        }
        FormSum::from_form(f)
    };
    for i in 0..50 {
        let (x, y, z) = (random_form(), random_form(), random_form());
        let (j, l) = poisson_defects(&x, &y, &z);
        check(j.is_zero() && l.is_zero(), || format!("triple {i} has a nonzero defect"))?;
    }
    Ok(format!("50 triples, seed {seed}"))
}

fn clifford(b: &Arc<KnBasis>) -> SuiteResult {
    let mut count = 0;
    for lt in [0i64, 1] {
        let fs = FockSpace::new(b.clone(), HalfInteger::from_twice(lt));
        let (lo, hi) = slot_window(&fs, h(-1), h(1));
        let (lo, hi) = (lo, hi.min(lo + 5));
        let slots: Vec<i64> = (lo..=hi).collect();
        let wedge: Vec<MeromorphicForm> = slots.iter().map(|&a| fs.basis.form(&fs.index(a)).expect("valid")).collect();
        let dual: Vec<MeromorphicForm> = slots.iter().map(|&a| fs.basis.form(&fs.index(a).dual()).expect("valid")).collect();
        for m in fs.monomials_between(lo, hi) {
            let v = FockVector::from_monomial(m.clone());
            for (i, f) in wedge.iter().enumerate() {
                for (j, g) in dual.iter().enumerate() {
                    let wc = fs.wedge_op(f, &fs.contraction_op(g, &v).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    let cw = fs.contraction_op(g, &fs.wedge_op(f, &v).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    let want = if i == j { v.clone() } else { FockVector::zero() };
                    check(wc.add(&cw) == want, || format!("λ={} slots ({},{}) on {m}", fs.lambda, slots[i], slots[j]))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} anticommutators"))
}

fn central(b: &Arc<KnBasis>) -> SuiteResult {
    let s = b.sphere();
    if s.k() != 1 || !s.point(1).is_zero() {
        return Ok("skipped: the closed form applies to the classical geometry".into());
    }
    let mut sign: Option<bool> = None;
    for lt in [0i64, 1, 2, 4] {
        let fs = FockSpace::new(b.clone(), HalfInteger::from_twice(lt));
        let probes = vec![fs.vacuum(fs.lambda).map_err(|e| e.to_string())?, WedgeMonomial::new(vec![-2], 1)];
        let chi = |n: i64| {
            fs.rep_cocycle_on(&witt_generator(n), &witt_generator(-n), &probes, 0)
                .map_err(|e| e.to_string())
        };
        let c1 = chi(1)?;
        let c = central_charge(fs.lambda);
        for n in 2..=4i64 {
            let reduced = chi(n)? - &c1 * &Gr::from_integer(n);
            let unit = &(&c * &Gr::from_integer(n * n * n - n)) * &Gr::ratio(1, 12);
            let positive = if reduced == unit {
                true
            } else if reduced == -unit.clone() {
                false
            } else {
                return Err(format!("λ={} n={n}: {reduced} is not ±{unit}", fs.lambda));
            };
            check(sign.is_none_or(|s| s == positive), || format!("sign changes at λ={}", fs.lambda))?;
            sign = Some(positive);
        }
    }
    Ok(format!("λ ∈ {{0, 1/2, 1, 2}}, sign {}", if sign == Some(false) { "-" } else { "+" }))
}

fn lax(cfg: &RunConfig) -> SuiteResult {
    let mut out = Vec::new();
    for kind in [LaxType::Gl(2), LaxType::Sl(2), LaxType::So(3), LaxType::Sp(2)] {
        let r = close_check(kind, cfg.sphere(), cfg.seed, 3).map_err(|e| format!("{kind}: {e}"))?;
        check(r.passed(), || format!("{kind}: {}", r.failures.join("; ")))?;
        out.push(kind.to_string());
    }
    Ok(format!("{} closed on 3 pairs, seed {}", out.join(" "), cfg.seed))
}

/// Runs every suite; returns the report, its CSV rendering and the names of
/// failing suites.
pub fn run(cfg: &RunConfig) -> Result<(Value, String, Vec<String>), CliError> {
    let (lo, hi) = cfg.window_or(-2, 2);
    eprintln!("seed: {}", cfg.seed);
    let b = Arc::new(KnBasis::new(cfg.sphere().clone()));
    let suites: Vec<(&str, SuiteResult)> = vec![
        ("duality", duality(&b, lo, hi)),
        ("almost-grading", almost_grading(&b, lo, hi)),
        ("cocycles", cocycles(cfg, &b, lo, hi)),
        ("super-jacobi", super_jacobi(&b, lo, hi)),
        ("poisson", poisson(&b, cfg.seed)),
        ("clifford", clifford(&b)),
        ("central-charge", central(&b)),
        ("lax", lax(cfg)),
    ];
    let mut rows = Vec::new();
    let mut csv = csv_row(&["suite", "passed", "detail"].map(String::from));
    let mut failed = Vec::new();
    for (name, r) in suites {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !passed {
            failed.push(name.to_string());
        }
        eprintln!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        csv.push_str(&csv_row(&[name.to_string(), passed.to_string(), detail.clone()]));
        rows.push(json!({"suite": name, "passed": passed, "detail": detail}));
    }
    let doc = json!({
        "geometry": cfg.geometry.to_json_value(),
        "window": [lo, hi],
        "seed": cfg.seed,
        "passed": failed.is_empty(),
        "suites": rows,
    });
    Ok((doc, csv, failed))
}
