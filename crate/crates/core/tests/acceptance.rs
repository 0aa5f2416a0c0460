//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion, written straight to stderr so it survives output capture.

use std::io::Write;
use std::sync::Arc;

use knalg::algebras::{
    CurrentAlgebra, CurrentElement, DiffOpAlgebra, FiniteLieAlgebra, FunctionAlgebra, LieAlgebra,
    SuperAlgebra, SuperElement, VectorFieldAlgebra,
};
use knalg::cocycles::{
    certify, even_odd_odd_defect, locality_scan, psi1, psi2, psi3, CentralExtension, Cocycle, CocycleKind,
    CocycleSpec, LocalityReport,
};
use knalg::exactnum::{Gr, HalfInteger};
use knalg::fock::{central_charge, slot_window, witt_generator, FockSpace, FockVector, WedgeMonomial};
use knalg::forms::{poisson_defects, FormSum, MeromorphicForm};
use knalg::geometry::{separating_cycle, CycleClass, Geometry, MarkedSphere};
use knalg::knbasis::{degrees_in, grading_bounds, GradedIndex, KnBasis, OpKind};
use knalg::lax::{close_check, LaxType};
use knalg::ratfunc::RationalFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn report(number: u32, name: &str, outcome: Outcome) {
    let line = match &outcome {
        Ok(detail) => format!("PASS [{number:>2}] {name}: {detail}"),
        Err(detail) => format!("FAIL [{number:>2}] {name}: {detail}"),
    };
    let _ = writeln!(std::io::stderr().lock(), "{line}");
    if let Err(detail) = outcome {
        panic!("criterion {number} ({name}) failed: {detail}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(n: i64) -> Gr {
    Gr::from_integer(n)
}

fn h(n: i64) -> HalfInteger {
    HalfInteger::from_int(n)
}

/// `z^k (dz)^λ`, the classical oracle independent of the basis constructor.
fn monomial(weight_twice: i64, k: i64) -> MeromorphicForm {
    MeromorphicForm::monomial(HalfInteger::from_twice(weight_twice), Gr::one(), k)
}

fn sphere(points: &[i64]) -> MarkedSphere {
    MarkedSphere::from_integers(points).unwrap()
}

fn three_points() -> MarkedSphere {
    MarkedSphere::new(vec![g(0), g(1), Gr::gaussian(0, 1)]).unwrap()
}

fn basis(s: &MarkedSphere) -> Arc<KnBasis> {
    Arc::new(KnBasis::new(s.clone()))
}

#[test]
fn criterion_01_witt_recovery() {
    let run = || -> Outcome {
        let b = basis(&MarkedSphere::classical());
        let vf = VectorFieldAlgebra { basis: b.clone() };
        let e = |n: i64| b.form(&GradedIndex::new(h(-1), h(n), 1).unwrap()).unwrap();
        for n in -10..=10 {
            ensure(e(n) == monomial(-2, n + 1), || format!("e_{n} is not z^{}d/dz", n + 1))?;
        }
        for n in -10..=10 {
            for m in -10..=10 {
                let got = vf.bracket(&e(n), &e(m));
                let want = monomial(-2, n + m + 1).scale(&g(m - n));
                ensure(got == want, || format!("[e_{n}, e_{m}] = {got}"))?;
            }
        }
        let table = b
            .structure_constants(h(-1), h(-1), OpKind::Bracket, h(-10), h(10))
            .map_err(|e| e.to_string())?;
        let gb = grading_bounds(&table).map_err(|e| e.to_string())?;
        ensure(gb.lower_shift == 0 && gb.upper_shift == 0, || format!("grading bounds {gb:?}"))?;
        for (key, terms) in &table.entries {
            let (n, m) = (key.n.floor(), key.m.floor());
            let want: Vec<((HalfInteger, usize), Gr)> =
                if n == m { vec![] } else { vec![((key.n + key.m, 1), g(m - n))] };
            let got: Vec<_> = terms.iter().map(|(k, v)| (*k, v.clone())).collect();
            ensure(got == want, || format!("table cell ({n},{m}) = {got:?}"))?;
        }
        Ok("441 brackets and table cells exact, grading bounds (0,0)".into())
    };
    report(1, "Witt recovery", run());
}

#[test]
fn criterion_02_kn_duality() {
    let run = || -> Outcome {
        let lambdas = [-2i64, -1, 0, 1, 2, 4];
        let mut count = 0usize;
        for s in [sphere(&[0]), sphere(&[0, 1]), three_points()] {
            let b = basis(&s);
            for &lt in &lambdas {
                let lam = HalfInteger::from_twice(lt);
                let dual = -lam + 1;
                let ns = degrees_in(lam, h(-6), h(6));
                let ms = degrees_in(lam, h(-6), h(6));
                let checked: Result<usize, String> = ns
                    .par_iter()
                    .map(|&n| {
                        let mut c = 0;
                        for &m in &ms {
                            for p in 1..=s.k() {
                                for r in 1..=s.k() {
                                    let f = b.form(&GradedIndex::new(lam, n, p).unwrap()).unwrap();
                                    let d = b.form(&GradedIndex::new(dual, -m, r).unwrap()).unwrap();
                                    let v = b.pairing(&f, &d).map_err(|e| e.to_string())?;
                                    let want = if n == m && p == r { Gr::one() } else { Gr::zero() };
                                    if v != want {
                                        return Err(format!("K={} λ={lam} ({n},{p}) vs ({m},{r}): {v}", s.k()));
                                    }
                                    c += 1;
                                }
                            }
                        }
                        Ok(c)
                    })
                    .sum();
                count += checked?;
            }
        }
        Ok(format!("{count} pairings equal δ_p^r δ_n^m"))
    };
    report(2, "KN duality", run());
}

#[test]
fn criterion_03_virasoro_cocycle() {
    let run = || -> Outcome {
        let s = MarkedSphere::classical();
        let c = separating_cycle(&s);
        let zero = RationalFunction::zero();
        for n in -10i64..=10 {
            for m in -10i64..=10 {
                let v = psi3(&s, &c, &zero, &monomial(-2, n + 1), &monomial(-2, m + 1));
                let want = if n + m == 0 { g(n * n * n - n) } else { g(0) };
                ensure(v == want, || format!("ψ³(e_{n}, e_{m}) = {v}"))?;
            }
        }
        let vf = VectorFieldAlgebra { basis: basis(&s) };
        let spec = CocycleSpec::separating(CocycleKind::Psi3, &s);
        let scale = CentralExtension::<VectorFieldAlgebra, CocycleSpec>::virasoro_scale();
        let ext = CentralExtension::new(vf, spec, Some(scale), -4, 4).map_err(|e| e.to_string())?;
        for n in -10i64..=10 {
            for m in -10i64..=10 {
                let r = ext.bracket(&ext.lift(monomial(-2, n + 1)), &ext.lift(monomial(-2, m + 1)));
                let base = monomial(-2, n + m + 1).scale(&g(m - n));
                let central = if n + m == 0 { Gr::ratio(-(n * n * n - n), 12) } else { g(0) };
                ensure(r.base == base && r.central == central, || {
                    format!("[ê_{n}, ê_{m}] = {:?} + {} t", r.base, r.central)
                })?;
            }
        }
        let t = ext.central();
        ensure(ext.is_zero(&ext.bracket(&t, &ext.lift(monomial(-2, 3)))), || "t is not central".into())?;
        Ok(format!(
            "ψ³ = (n³−n)δ for |n|,|m| ≤ 10; extension certified on {} triples",
            ext.certified_triples
        ))
    };
    report(3, "Virasoro cocycle", run());
}

fn geometries_k12() -> Vec<Geometry> {
    vec![
        Geometry::with_default_connections(MarkedSphere::classical()),
        Geometry::new(sphere(&[0, 1]), "z^2 + 1".parse().unwrap(), RationalFunction::zero()).unwrap(),
    ]
}

fn certify_window<A: LieAlgebra, C: Cocycle<A>>(alg: &A, c: &C, lo: i64, hi: i64) -> Result<usize, String> {
    let b = alg.basis_in_window(h(lo), HalfInteger::from_twice(2 * hi + 1));
    certify(alg, c, &b).map_err(|e| e.to_string())
}

#[test]
fn criterion_04_cocycle_conditions() {
    let run = || -> Outcome {
        let mut triples = 0usize;
        let mut eoo = 0usize;
        for geom in geometries_k12() {
            let s = &geom.sphere;
            let b = basis(s);
            let cs = separating_cycle(s);
            let spec = |kind| CocycleSpec::new(kind, &geom, cs.clone()).unwrap();
            let d1 = DiffOpAlgebra { basis: b.clone() };
            for kind in [CocycleKind::Psi1, CocycleKind::Psi3, CocycleKind::Psi4] {
                triples += certify_window(&d1, &spec(kind), -4, 4).map_err(|e| format!("K={} {kind}: {e}", s.k()))?;
            }
            let cur = CurrentAlgebra { basis: b.clone(), g: Arc::new(FiniteLieAlgebra::sl2()) };
            triples += certify_window(&cur, &spec(CocycleKind::Psi2), -4, 4).map_err(|e| format!("K={} psi2: {e}", s.k()))?;
            let sup = SuperAlgebra { basis: b.clone() };
            let phi = spec(CocycleKind::SuperPhi);
            triples += certify_window(&sup, &phi, -4, 4).map_err(|e| format!("K={} phi: {e}", s.k()))?;
            let elems: Vec<SuperElement> = sup
                .basis_in_window(h(-4), HalfInteger::from_twice(9))
                .into_iter()
                .map(|v| v.element)
                .collect();
            let even: Vec<&SuperElement> = elems.iter().filter(|e| sup.parity(e) == Some(0)).collect();
            let odd: Vec<&SuperElement> = elems.iter().filter(|e| sup.parity(e) == Some(1)).collect();
            let bad = even.par_iter().find_map_any(|e| {
                for a in &odd {
                    for c in &odd {
                        let d = even_odd_odd_defect(&sup, &phi, e, a, c);
                        if !d.is_zero() {
                            return Some(format!("K={} (even,odd,odd) defect {d} at {e:?}, {a:?}, {c:?}", s.k()));
                        }
                    }
                }
                None
            });
            if let Some(msg) = bad {
                return Err(msg);
            }
            eoo += even.len() * odd.len() * odd.len();
        }
        Ok(format!("{triples} basis triples with zero defect; {eoo} (even,odd,odd) triples"))
    };
    report(4, "cocycle conditions", run());
}

fn describe(r: &LocalityReport) -> String {
    match r.support {
        Some(w) => format!("[{}, {}]", w.m1, w.m2),
        None => "∅".into(),
    }
}

#[test]
fn criterion_05_locality() {
    let run = || -> Outcome {
        let mut lines = Vec::new();
        for s in [MarkedSphere::classical(), sphere(&[0, 1])] {
            let b = basis(&s);
            let spec = |kind, cycle: &CycleClass| {
                let mut c = CocycleSpec::separating(kind, &s);
                c.cycle = cycle.clone();
                c
            };
            let mut cycles = vec![("C_S".to_string(), separating_cycle(&s), true)];
            if s.k() == 2 {
                for p in 1..=2 {
                    cycles.push((format!("C_{p}"), CycleClass::circle(&s, p).unwrap(), false));
                }
            }
            for (name, cycle, separating) in &cycles {
                let fa = FunctionAlgebra { basis: b.clone() };
                let vf = VectorFieldAlgebra { basis: b.clone() };
                let d1 = DiffOpAlgebra { basis: b.clone() };
                let sup = SuperAlgebra { basis: b.clone() };
                let reports = [
                    ("psi1", locality_scan(&fa, &spec(CocycleKind::Psi1, cycle), -8, 8, 4)),
                    ("psi3", locality_scan(&vf, &spec(CocycleKind::Psi3, cycle), -8, 8, 4)),
                    ("psi4", locality_scan(&d1, &spec(CocycleKind::Psi4, cycle), -8, 8, 4)),
                    ("phi", locality_scan(&sup, &spec(CocycleKind::SuperPhi, cycle), -8, 8, 4)),
                ];
                for (kind, r) in reports {
                    let tag = format!("K={} {kind} over {name}", s.k());
                    ensure(r.support.is_some(), || format!("{tag}: empty support"))?;
                    if *separating {
                        ensure(r.local(), || format!("{tag}: not local ({} → {:?})", describe(&r), r.grown_support))?;
                    } else {
                        ensure(r.bounded_above, || format!("{tag}: unbounded above ({} → {:?})", describe(&r), r.grown_support))?;
                    }
                    lines.push(format!("{tag} {}{}", describe(&r), if r.local() { " stable" } else { " stable above" }));
                }
            }
        }
        Ok(lines.join("; "))
    };
    report(5, "locality", run());
}

#[test]
fn criterion_06_almost_grading() {
    let run = || -> Outcome {
        let mut lines = Vec::new();
        for s in [sphere(&[0, 1]), three_points()] {
            let b = basis(&s);
            let cases = [
                (h(-1), h(-1), OpKind::Bracket),
                (h(0), h(0), OpKind::Product),
                (h(0), h(-1), OpKind::Product),
                (h(0), h(-1), OpKind::Bracket),
            ];
            for (lam, nu, op) in cases {
                let tag = format!("K={} ({lam},{nu}) {op}", s.k());
                let small = b.structure_constants(lam, nu, op, h(-2), h(2)).map_err(|e| e.to_string())?;
                let large = b.structure_constants(lam, nu, op, h(-4), h(4)).map_err(|e| e.to_string())?;
                let (gs, gl) = (grading_bounds(&small).unwrap(), grading_bounds(&large).unwrap());
                ensure(gs.lower_shift == 0 && gl.lower_shift == 0, || format!("{tag}: lower shift {gs:?} {gl:?}"))?;
                ensure(gs.upper_shift == gl.upper_shift, || format!("{tag}: upper shift moved {gs:?} → {gl:?}"))?;
                let bad = large.leading_term_mismatches();
                ensure(bad.is_empty(), || format!("{tag}: leading terms differ at {:?}", &bad[..bad.len().min(3)]))?;
                lines.push(format!("{tag} R={}", gl.upper_shift));
            }
        }
        Ok(lines.join("; "))
    };
    report(6, "almost-grading", run());
}

fn random_form(b: &KnBasis, rng: &mut ChaCha8Rng) -> FormSum {
    let weights = [-2i64, -1, 0, 2];
    let w = HalfInteger::from_twice(weights[rng.gen_range(0..weights.len())]);
    let degrees = degrees_in(w, h(-3), h(3));
    let mut f = MeromorphicForm::zero(w);
    for _ in 0..rng.gen_range(1..=3) {
        let n = degrees[rng.gen_range(0..degrees.len())];
        let p = rng.gen_range(1..=b.k());
        let c = Gr::gaussian(rng.gen_range(-3..=3), rng.gen_range(-2..=2));
        f = f.add(&b.form(&GradedIndex::new(w, n, p).unwrap()).unwrap().scale(&c));
    }
    FormSum::from_form(f)
}

#[test]
fn criterion_07_poisson_structure() {
    let run = || -> Outcome {
        let b = basis(&sphere(&[0, 1]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let triples: Vec<[FormSum; 3]> = (0..200)
            .map(|_| [random_form(&b, &mut rng), random_form(&b, &mut rng), random_form(&b, &mut rng)])
            .collect();
        let bad = triples.par_iter().enumerate().find_map_any(|(i, [a, x, y])| {
            let (j, l) = poisson_defects(a, x, y);
            (!j.is_zero() || !l.is_zero()).then(|| format!("triple {i}: Jacobi {j:?}, Leibniz {l:?}"))
        });
        match bad {
            Some(msg) => Err(msg),
            None => Ok("200 seeded triples (seed 7), Jacobi and Leibniz defects 0".into()),
        }
    };
    report(7, "Poisson structure", run());
}

#[test]
fn criterion_08_super_jacobi() {
    let run = || -> Outcome {
        let mut total = 0usize;
        for s in [MarkedSphere::classical(), sphere(&[0, 1])] {
            let sup = SuperAlgebra { basis: basis(&s) };
            let elems: Vec<SuperElement> = sup
                .basis_in_window(h(-3), HalfInteger::from_twice(7))
                .into_iter()
                .map(|v| v.element)
                .collect();
            let n = elems.len();
            let bad = (0..n).into_par_iter().find_map_any(|i| {
                for j in 0..n {
                    for k in 0..n {
                        let d = sup.jacobi_defect(&elems[i], &elems[j], &elems[k]).unwrap();
                        if !sup.is_zero(&d) {
                            return Some(format!("K={} defect at ({i},{j},{k})", s.k()));
                        }
                    }
                }
                None
            });
            if let Some(msg) = bad {
                return Err(msg);
            }
            total += n * n * n;
        }
        Ok(format!("{total} ordered homogeneous triples"))
    };
    report(8, "super-Jacobi", run());
}

#[test]
fn criterion_09_clifford() {
    let run = || -> Outcome {
        let mut checked = 0usize;
        for lt in [0i64, 1, 4] {
            let fs = FockSpace::new(basis(&MarkedSphere::classical()), HalfInteger::from_twice(lt));
            let (lo, hi) = slot_window(&fs, h(-4), h(4));
            let monos: Vec<WedgeMonomial> = fs.monomials_between(lo, hi);
            let slots: Vec<i64> = (lo..=hi).collect();
            let wedge_forms: Vec<MeromorphicForm> = slots.iter().map(|&a| fs.basis.form(&fs.index(a)).unwrap()).collect();
            let dual_forms: Vec<MeromorphicForm> =
                slots.iter().map(|&a| fs.basis.form(&fs.index(a).dual()).unwrap()).collect();
            let w = |f: &MeromorphicForm, v: &FockVector| fs.wedge_op(f, v).unwrap();
            let c = |f: &MeromorphicForm, v: &FockVector| fs.contraction_op(f, v).unwrap();
            let bad = monos.par_iter().find_map_any(|m| {
                let v = FockVector::from_monomial(m.clone());
                let wv: Vec<FockVector> = wedge_forms.iter().map(|f| w(f, &v)).collect();
                let cv: Vec<FockVector> = dual_forms.iter().map(|f| c(f, &v)).collect();
                for (i, fa) in wedge_forms.iter().enumerate() {
                    for (j, gb) in dual_forms.iter().enumerate() {
                        let mixed = w(fa, &cv[j]).add(&c(gb, &wv[i]));
                        let want = if i == j { v.clone() } else { FockVector::zero() };
                        if mixed != want {
                            return Some(format!("λ={} mixed ({},{}) on {m}", fs.lambda, slots[i], slots[j]));
                        }
                        let ww = w(fa, &wv[j]).add(&w(&wedge_forms[j], &wv[i]));
                        let cc = c(gb, &cv[i]).add(&c(&dual_forms[i], &cv[j]));
                        if !ww.is_zero() || !cc.is_zero() {
                            return Some(format!("λ={} like ({},{}) on {m}", fs.lambda, slots[i], slots[j]));
                        }
                    }
                }
                None
            });
            if let Some(msg) = bad {
                return Err(msg);
            }
            checked += monos.len() * slots.len() * slots.len();
        }
        Ok(format!("{checked} (monomial, pair) checks over λ ∈ {{0, ½, 2}}"))
    };
    report(9, "Clifford relations", run());
}

#[test]
fn criterion_10_central_charge() {
    let run = || -> Outcome {
        let mut global: Option<i64> = None;
        let mut lines = Vec::new();
        for lt in [0i64, 1, 2, 4] {
            let fs = FockSpace::new(basis(&MarkedSphere::classical()), HalfInteger::from_twice(lt));
            let vac = fs.vacuum(fs.lambda).unwrap();
            let probes = vec![vac.clone(), WedgeMonomial::new(vec![-3, -1], 1), WedgeMonomial::new(vec![-2], 2)];
            let chi = |n: i64| {
                fs.rep_cocycle_on(&witt_generator(n), &witt_generator(-n), &probes, 0)
                    .map_err(|e| e.to_string())
            };
            let c1 = chi(1)?;
            // Oracle: the classical b–c central charge.
            let l = lt as f64 / 2.0;
            let c_oracle = -2.0 * (6.0 * l * l - 6.0 * l + 1.0);
            let c = central_charge(fs.lambda);
            ensure(c == Gr::ratio((c_oracle * 2.0) as i64, 2), || format!("c_λ = {c}, expected {c_oracle}"))?;
            for n in -4i64..=4 {
                let reduced = chi(n)? - &c1 * &g(n);
                let unit = &(&c * &g(n * n * n - n)) * &Gr::ratio(1, 12);
                if unit.is_zero() {
                    ensure(reduced.is_zero(), || format!("λ={}: n={n} leaves {reduced}", fs.lambda))?;
                    continue;
                }
                let s = if reduced == unit {
                    1
                } else if reduced == -unit.clone() {
                    -1
                } else {
                    return Err(format!("λ={} n={n}: {reduced} is not ±{unit}", fs.lambda));
                };
                ensure(global.is_none_or(|x| x == s), || format!("sign flips at λ={} n={n}", fs.lambda))?;
                global = Some(s);
            }
            lines.push(format!("λ={} c={c}", fs.lambda));
        }
        Ok(format!("{}; global sign s = {}", lines.join(", "), global.unwrap_or(0)))
    };
    report(10, "central charge", run());
}

#[test]
fn criterion_11_affine_cocycle() {
    let run = || -> Outcome {
        let s = MarkedSphere::classical();
        let c = separating_cycle(&s);
        let sl2 = FiniteLieAlgebra::sl2();
        let mats = sl2.matrices().expect("matrix algebra");
        for i in 0..sl2.dim() {
            for j in 0..sl2.dim() {
                // Oracle: the trace form tr(XY) computed from the matrices.
                let mut tr = Gr::zero();
                for a in 0..2 {
                    for b in 0..2 {
                        tr += &(&mats[i][a][b] * &mats[j][b][a]);
                    }
                }
                ensure(*sl2.beta(i, j) == tr, || format!("β({i},{j}) = {} ≠ tr = {tr}", sl2.beta(i, j)))?;
                for n in -8i64..=8 {
                    for m in -8i64..=8 {
                        let x = CurrentElement::simple(i, monomial(0, n));
                        let y = CurrentElement::simple(j, monomial(0, m));
                        let v = psi2(&s, &c, sl2.beta_matrix(), &x, &y);
                        let p1 = psi1(&s, &c, &monomial(0, n), &monomial(0, m));
                        let want_p1 = if n + m == 0 { g(-n) } else { g(0) };
                        ensure(p1 == want_p1, || format!("ψ¹(z^{n}, z^{m}) = {p1}"))?;
                        ensure(v == &tr * &p1, || format!("ψ²(x_{i}⊗z^{n}, x_{j}⊗z^{m}) = {v}"))?;
                    }
                }
            }
        }
        let cur = CurrentAlgebra { basis: basis(&s), g: Arc::new(sl2) };
        let ext = CentralExtension::new(cur, CocycleSpec::separating(CocycleKind::Psi2, &s), None, -3, 3)
            .map_err(|e| e.to_string())?;
        let elems: Vec<_> = ext.basis_in_window(h(-3), h(3)).into_iter().map(|v| v.element).collect();
        let n = elems.len();
        let bad = (0..n).into_par_iter().find_map_any(|i| {
            for j in 0..n {
                for k in 0..n {
                    let d = ext.jacobi_defect(&elems[i], &elems[j], &elems[k]).unwrap();
                    if !ext.is_zero(&d) {
                        return Some(format!("Jacobi defect at ({i},{j},{k})"));
                    }
                }
            }
            None
        });
        if let Some(msg) = bad {
            return Err(msg);
        }
        Ok(format!("ψ² = β·ψ¹ for |n|,|m| ≤ 8; extension Jacobi on {} triples", n * n * n))
    };
    report(11, "affine cocycle", run());
}

#[test]
fn criterion_12_lax_closure() {
    let run = || -> Outcome {
        let s = sphere(&[0, 1]);
        let mut lines = Vec::new();
        for kind in [LaxType::Gl(2), LaxType::Sl(2), LaxType::So(3), LaxType::Sp(2)] {
            let r = close_check(kind, &s, 12, 20).map_err(|e| format!("{kind}: {e}"))?;
            ensure(r.passed(), || format!("{kind}: {}", r.failures.join("; ")))?;
            ensure(r.brackets_valid == 20 && r.degeneration_exact == 20, || format!("{kind}: {r:?}"))?;
            lines.push(format!("{kind} {}/{} brackets", r.brackets_valid, r.pairs));
        }
        Ok(format!("{}; α→0 degeneration exact; seed 12", lines.join(", ")))
    };
    report(12, "Lax closure", run());
}
