//! Subcommand implementations. Each builds a JSON document and a CSV
//! rendering and hands both to [`RunConfig::emit`].

use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use knalg::algebras::{
    CurrentAlgebra, D1Element, DiffOpAlgebra, FiniteLieAlgebra, FunctionAlgebra, LieAlgebra, SuperAlgebra,
    VectorFieldAlgebra,
};
use knalg::cocycles::{cocycle_support, CentralExtension, Cocycle, CocycleError, CocycleKind, CocycleSpec};
use knalg::exactnum::{Gr, HalfInteger};
use knalg::fock::{central_charge, slot_window, witt_generator, FockError, FockSpace, WedgeMonomial};
use knalg::forms::MeromorphicForm;
use knalg::geometry::separating_cycle;
use knalg::knbasis::{degrees_in, grading_bounds, GradedIndex, KnBasis, OpKind};
use knalg::lax::{close_check, is_lax_element, matrix_from_json_str, LaxType, TyurinData};
use knalg::ratfunc::{ExtendedPoint, RationalFunction};

use crate::config::{config_err, csv_row, CliError, Command, LaxAction, Op, RunConfig};
use crate::verify;

/// Widest slot range tabulated explicitly by `fock` (2^12 monomials).
const MAX_FOCK_SLOTS: i64 = 12;

pub fn dispatch(cfg: &RunConfig, cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Basis => basis(cfg),
        Command::Pairing => pairing(cfg),
        Command::Structconsts { op } => structconsts(cfg, *op),
        Command::Cocycle { kind, algebra } => cocycle(cfg, kind, algebra),
        Command::Extend { kind, algebra, rescale } => extend(cfg, kind, algebra, rescale.as_deref()),
        Command::Fock { vacuum, vector, function } => fock(cfg, vacuum.as_deref(), vector.as_deref(), function.as_deref()),
        Command::Lax { action } => lax(cfg, action),
        Command::Verify => {
            let (doc, csv, failed) = verify::run(cfg)?;
            cfg.emit(&doc, csv)?;
            match failed.is_empty() {
                true => Ok(()),
                false => Err(CliError::Verification(format!("failing suites: {}", failed.join(", ")))),
            }
        }
    }
}

fn h(n: i64) -> HalfInteger {
    HalfInteger::from_int(n)
}

fn geometry_json(cfg: &RunConfig) -> Value {
    cfg.geometry.to_json_value()
}

/// `c·Π (z − P_i)^{e_i}` in a form the expression parser reads back.
fn factored(c: &Gr, points: &[Gr], exponents: &[i64]) -> String {
    let mut parts = vec![format!("({c})")];
    for (p, &e) in points.iter().zip(exponents) {
        if e == 0 {
            continue;
        }
        let base = if p.is_zero() { "z".to_string() } else { format!("(z - ({p}))") };
        parts.push(if e == 1 { base } else { format!("{base}^{e}") });
    }
    parts.join("*")
}

fn basis(cfg: &RunConfig) -> Result<(), CliError> {
    let lam = cfg.lambda.unwrap_or(h(-1));
    let (lo, hi) = cfg.window_or(-2, 2);
    let b = KnBasis::new(cfg.sphere().clone());
    let points = cfg.sphere().in_points();
    let mut rows = Vec::new();
    let mut csv = csv_row(&["weight", "degree", "point", "constant", "exponents", "order_at_infinity", "factored"].map(String::from));
    for n in degrees_in(lam, h(lo), h(hi)) {
        for p in 1..=b.k() {
            let idx = GradedIndex::new(lam, n, p).map_err(config_err)?;
            let el = b.element(&idx).map_err(config_err)?;
            let at_inf = el.form.order_at(&ExtendedPoint::Infinity);
            let fac = factored(&el.constant, points, &el.exponents);
            let exps: Vec<String> = el.exponents.iter().map(i64::to_string).collect();
            csv.push_str(&csv_row(&[
                lam.to_string(),
                n.to_string(),
                p.to_string(),
                el.constant.to_string(),
                exps.join(" "),
                at_inf.map_or("-".into(), |o| o.to_string()),
                fac.clone(),
            ]));
            rows.push(json!({
                "weight": lam.to_string(),
                "degree": n.to_string(),
                "point": p,
                "constant": el.constant.to_string(),
                "exponents": el.exponents,
                "order_at_infinity": at_inf,
                "factored": fac,
                "form": el.form.rep().to_string(),
            }));
        }
    }
    let doc = json!({
        "geometry": geometry_json(cfg),
        "local_coordinates": "z_p = z - P_p",
        "weight": lam.to_string(),
        "window": [lo, hi],
        "elements": rows,
    });
    cfg.emit(&doc, csv)
}

fn pairing(cfg: &RunConfig) -> Result<(), CliError> {
    let lam = cfg.lambda.unwrap_or(h(-1));
    let (lo, hi) = cfg.window_or(-2, 2);
    let b = KnBasis::new(cfg.sphere().clone());
    let dual_weight = -lam + 1;
    let degrees = degrees_in(lam, h(lo), h(hi));
    let mut rows = Vec::new();
    let mut csv = csv_row(&["n", "p", "m", "r", "value"].map(String::from));
    let mut off_delta = 0usize;
    for &n in &degrees {
        for &m in &degrees {
            for p in 1..=b.k() {
                for r in 1..=b.k() {
                    let f = b.form(&GradedIndex::new(lam, n, p).map_err(config_err)?).map_err(config_err)?;
                    let g = b.form(&GradedIndex::new(dual_weight, -m, r).map_err(config_err)?).map_err(config_err)?;
                    let v = b.pairing(&f, &g).map_err(config_err)?;
                    let delta = n == m && p == r;
                    if v != if delta { Gr::one() } else { Gr::zero() } {
                        off_delta += 1;
                    }
                    if !v.is_zero() {
                        csv.push_str(&csv_row(&[n.to_string(), p.to_string(), m.to_string(), r.to_string(), v.to_string()]));
                        rows.push(json!({"n": n.to_string(), "p": p, "m": m.to_string(), "r": r, "value": v.to_string()}));
                    }
                }
            }
        }
    }
    let doc = json!({
        "geometry": geometry_json(cfg),
        "lambda": lam.to_string(),
        "window": [lo, hi],
        "dual": off_delta == 0,
        "nonzero": rows,
    });
    cfg.emit(&doc, csv)?;
    match off_delta {
        0 => Ok(()),
        k => Err(CliError::Verification(format!("{k} pairings differ from δ_p^r δ_n^m"))),
    }
}

fn structconsts(cfg: &RunConfig, op: Op) -> Result<(), CliError> {
    let lam = cfg.lambda.unwrap_or(h(-1));
    let nu = cfg.nu.unwrap_or(lam);
    let (lo, hi) = cfg.window_or(-3, 3);
    let op = match op {
        Op::Bracket => OpKind::Bracket,
        Op::Product => OpKind::Product,
    };
    let b = KnBasis::new(cfg.sphere().clone());
    let table = b.structure_constants(lam, nu, op, h(lo), h(hi)).map_err(config_err)?;
    let gb = grading_bounds(&table).map_err(config_err)?;
    let margin = hi - lo;
    if margin < gb.upper_shift + 2 {
        eprintln!(
            "warning: window {lo}:{hi} has margin {margin} < upper shift {} + 2; grading bounds may be truncated",
            gb.upper_shift
        );
    }
    let mismatches = table.leading_term_mismatches();
    let mut doc = table.to_json();
    doc["grading_bounds"] = json!({"lower_shift": gb.lower_shift, "upper_shift": gb.upper_shift});
    doc["leading_term_mismatches"] = json!(mismatches.len());
    doc["window"] = json!([lo, hi]);
    doc["geometry"] = geometry_json(cfg);
    cfg.emit(&doc, table.to_csv())?;
    if gb.lower_shift != 0 || !mismatches.is_empty() {
        return Err(CliError::Verification(format!(
            "lower shift {} and {} leading-term mismatches",
            gb.lower_shift,
            mismatches.len()
        )));
    }
    Ok(())
}

fn load_algebra(spec: &str) -> Result<FiniteLieAlgebra, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        FiniteLieAlgebra::from_json_file(path).map_err(config_err)
    } else {
        FiniteLieAlgebra::by_name(spec).map_err(config_err)
    }
}

fn cocycle_spec(cfg: &RunConfig, kind: &str) -> Result<CocycleSpec, CliError> {
    let kind: CocycleKind = kind.parse().map_err(config_err)?;
    let cycle = cfg.cycle.clone().unwrap_or_else(|| separating_cycle(cfg.sphere()));
    CocycleSpec::new(kind, &cfg.geometry, cycle).map_err(config_err)
}

/// Calls `$body` with `$alg` bound to the algebra on which `$spec` lives.
macro_rules! with_algebra {
    ($cfg:expr, $spec:expr, $algebra:expr, |$alg:ident| $body:expr) => {{
        let basis = Arc::new(KnBasis::new($cfg.sphere().clone()));
        match $spec.kind {
            CocycleKind::Psi1 => {
                let $alg = FunctionAlgebra { basis };
                $body
            }
            CocycleKind::Psi2 => {
                let $alg = CurrentAlgebra { basis, g: Arc::new(load_algebra($algebra)?) };
                $body
            }
            CocycleKind::Psi3 => {
                let $alg = VectorFieldAlgebra { basis };
                $body
            }
            CocycleKind::Psi4 => {
                let $alg = DiffOpAlgebra { basis };
                $body
            }
            CocycleKind::SuperPhi => {
                let $alg = SuperAlgebra { basis };
                $body
            }
        }
    }};
}

fn support_table<A: LieAlgebra>(alg: &A, c: &impl Cocycle<A>, lo: i64, hi: i64, scale: &Gr) -> (Vec<Value>, String, Option<(i64, i64)>) {
    let rows = cocycle_support(alg, c, lo, hi);
    let mut csv = csv_row(&["x", "y", "degree_sum", "value"].map(String::from));
    let mut json_rows = Vec::new();
    let mut window: Option<(i64, i64)> = None;
    for (x, y, sum, v) in rows {
        let v = scale * &v;
        let s = sum.floor();
        window = Some(window.map_or((s, s), |(a, b)| (a.min(s), b.max(s))));
        csv.push_str(&csv_row(&[x.clone(), y.clone(), sum.to_string(), v.to_string()]));
        json_rows.push(json!({"x": x, "y": y, "degree_sum": sum.to_string(), "value": v.to_string()}));
    }
    (json_rows, csv, window)
}

fn cocycle(cfg: &RunConfig, kind: &str, algebra: &str) -> Result<(), CliError> {
    let spec = cocycle_spec(cfg, kind)?;
    let (lo, hi) = cfg.window_or(-4, 4);
    let (rows, csv, support) = with_algebra!(cfg, spec, algebra, |alg| {
        spec.check_supported_on(&alg)?;
        support_table(&alg, &spec, lo, hi, &Gr::one())
    });
    let doc = json!({
        "geometry": geometry_json(cfg),
        "kind": spec.kind.to_string(),
        "cycle": spec.cycle.multiplicities(),
        "window": [lo, hi],
        "support": support.map(|(a, b)| json!({"m1": a, "m2": b})),
        "values": rows,
    });
    cfg.emit(&doc, csv)
}

trait CheckSupported<A: LieAlgebra> {
    fn check_supported_on(&self, alg: &A) -> Result<(), CliError>;
}

impl<A: LieAlgebra> CheckSupported<A> for CocycleSpec
where
    CocycleSpec: Cocycle<A>,
{
    fn check_supported_on(&self, _alg: &A) -> Result<(), CliError> {
        <CocycleSpec as Cocycle<A>>::check_supported(self).map_err(config_err)
    }
}

fn parse_scale(s: Option<&str>) -> Result<Option<Gr>, CliError> {
    match s {
        None => Ok(None),
        Some("virasoro") => Ok(Some(Gr::ratio(-1, 12))),
        Some(v) => v
            .parse::<Gr>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("--rescale {v:?} is neither a scalar nor \"virasoro\""))),
    }
}

fn extension_error(e: CocycleError) -> CliError {
    match e {
        CocycleError::NotACocycle { .. } => CliError::Verification(e.to_string()),
        other => config_err(other),
    }
}

fn extend(cfg: &RunConfig, kind: &str, algebra: &str, rescale: Option<&str>) -> Result<(), CliError> {
    let spec = cocycle_spec(cfg, kind)?;
    let (lo, hi) = cfg.window_or(-3, 3);
    let scale = parse_scale(rescale)?;
    let (triples, rows, csv) = with_algebra!(cfg, spec.clone(), algebra, |alg| {
        let ext = CentralExtension::new(alg, spec.clone(), scale.clone(), lo, hi).map_err(extension_error)?;
        let (rows, csv, _) = support_table(&ext.algebra, &ext.cocycle, lo, hi, &ext.scale);
        (ext.certified_triples, rows, csv)
    });
    let doc = json!({
        "geometry": geometry_json(cfg),
        "kind": spec.kind.to_string(),
        "cycle": spec.cycle.multiplicities(),
        "window": [lo, hi],
        "scale": scale.unwrap_or_else(Gr::one).to_string(),
        "certified_triples": triples,
        "central_terms": rows,
    });
    cfg.emit(&doc, csv)
}

fn parse_form(expr: &str, what: &str) -> Result<RationalFunction, CliError> {
    expr.parse().map_err(|e| CliError::Config(format!("--{what} {expr:?}: {e}")))
}

fn fock_error(e: FockError) -> CliError {
    match e {
        FockError::NotScalar { .. } | FockError::ProbeDependent { .. } => CliError::Verification(e.to_string()),
        other => config_err(other),
    }
}

fn fock(cfg: &RunConfig, vacuum: Option<&str>, vector: Option<&str>, function: Option<&str>) -> Result<(), CliError> {
    let lam = cfg.lambda.unwrap_or(h(0));
    let (lo, hi) = cfg.window_or(-2, 2);
    let t: HalfInteger = match vacuum {
        Some(v) => v.parse().map_err(|_| CliError::Config(format!("--vacuum {v:?} is not a half-integer")))?,
        None => lam,
    };
    let sphere = cfg.sphere();
    let space = FockSpace::new(Arc::new(KnBasis::new(sphere.clone())), lam);
    let vac = space.vacuum(t).map_err(config_err)?;
    let reference = vac.tail_start();
    let vector = MeromorphicForm::vector_field(parse_form(vector.unwrap_or("z^2"), "vector")?);
    let function = MeromorphicForm::function(parse_form(function.unwrap_or("0"), "function")?);
    for f in [&vector, &function] {
        f.check_poles(sphere).map_err(config_err)?;
    }
    let x = D1Element::new(function, vector);
    let (slo, shi) = slot_window(&space, h(lo), h(hi));
    if shi - slo + 1 > MAX_FOCK_SLOTS {
        return Err(CliError::Config(format!(
            "window {lo}:{hi} spans {} slots; at most {MAX_FOCK_SLOTS} are tabulated",
            shi - slo + 1
        )));
    }
    let op = space.operator(&x, reference).map_err(fock_error)?;
    let mut columns = Vec::new();
    let mut csv = csv_row(&["source", "target", "coefficient"].map(String::from));
    for m in space.monomials_between(slo, shi) {
        let image = op.apply_monomial(&m).map_err(fock_error)?;
        let terms: Vec<Value> = image
            .terms()
            .iter()
            .map(|(w, c)| {
                csv.push_str(&csv_row(&[m.to_string(), w.to_string(), c.to_string()]));
                json!({"monomial": w.to_string(), "c": c.to_string()})
            })
            .collect();
        columns.push(json!({"monomial": m.to_string(), "image": terms}));
    }
    // χ(x_n, x_{−n}) for the vector fields f^{-1}_{±n,1}; on the classical
    // sphere `closed_form` is (c_λ/12)(n³ − n).
    let classical = sphere.k() == 1 && sphere.point(1).is_zero();
    let generator = |n: i64| -> Result<D1Element, CliError> {
        if classical {
            return Ok(witt_generator(n));
        }
        let idx = GradedIndex::new(h(-1), h(n), 1).map_err(config_err)?;
        Ok(D1Element::from_vector(space.basis.form(&idx).map_err(config_err)?))
    };
    let probes = vec![vac.clone(), WedgeMonomial::new(vec![reference - 3, reference - 1], reference + 1)];
    let chi = |n: i64| -> Result<Gr, CliError> {
        space
            .rep_cocycle_on(&generator(n)?, &generator(-n)?, &probes, reference)
            .map_err(fock_error)
    };
    let c1 = chi(1)?;
    let c_lambda = central_charge(lam);
    let mut central = Vec::new();
    for n in 1..=4i64 {
        let value = chi(n)?;
        let reduced = &value - &(&c1 * &Gr::from_integer(n));
        let mut row = json!({"n": n, "chi": value.to_string(), "reduced": reduced.to_string()});
        if classical {
            row["closed_form"] = json!((&(&c_lambda * &Gr::from_integer(n * n * n - n)) * &Gr::ratio(1, 12)).to_string());
        }
        central.push(row);
    }
    let doc = json!({
        "geometry": geometry_json(cfg),
        "lambda": lam.to_string(),
        "vacuum_degree": t.to_string(),
        "reference_slot": reference,
        "slots": [slo, shi],
        "operator": {"vector": x.vector.rep().to_string(), "function": x.function.rep().to_string()},
        "columns": columns,
        "central": central,
        "c_lambda": c_lambda.to_string(),
    });
    cfg.emit(&doc, csv)
}

fn lax(cfg: &RunConfig, action: &LaxAction) -> Result<(), CliError> {
    let sphere = cfg.sphere();
    match action {
        LaxAction::Check { kind, tyurin, element } => {
            let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())));
            let mut data: Value = serde_json::from_str(&read(tyurin)?).map_err(|e| CliError::Config(format!("{}: {e}", tyurin.display())))?;
            if let Some(k) = kind {
                let k: LaxType = k.parse().map_err(config_err)?;
                data["type"] = json!(k.to_string());
            }
            let t = TyurinData::from_json_str(&data.to_string(), sphere).map_err(config_err)?;
            let l = matrix_from_json_str(&read(element)?).map_err(config_err)?;
            let report = is_lax_element(&l, &t, sphere);
            let mut csv = csv_row(&["point", "constraint", "detail"].map(String::from));
            for v in &report.violations {
                csv.push_str(&csv_row(&[v.point.map_or("-".into(), |p| p.to_string()), v.constraint.clone(), v.detail.clone()]));
            }
            let doc = json!({
                "type": t.kind.to_string(),
                "valid": report.is_valid(),
                "violations": report.violations,
            });
            cfg.emit(&doc, csv)?;
            match report.is_valid() {
                true => Ok(()),
                false => Err(CliError::Verification(report.to_string())),
            }
        }
        LaxAction::CloseCheck { kind, pairs } => {
            let k: LaxType = kind.parse().map_err(config_err)?;
            eprintln!("seed: {}", cfg.seed);
            let rep = close_check(k, sphere, cfg.seed, *pairs).map_err(config_err)?;
            let csv = csv_row(&["type", "seed", "pairs", "brackets_valid", "jacobi_zero", "degeneration_exact", "passed"].map(String::from))
                + &csv_row(&[
                    rep.kind.clone(),
                    rep.seed.to_string(),
                    rep.pairs.to_string(),
                    rep.brackets_valid.to_string(),
                    rep.jacobi_zero.to_string(),
                    rep.degeneration_exact.to_string(),
                    rep.passed().to_string(),
                ]);
            let mut doc = serde_json::to_value(&rep).expect("serializable");
            doc["passed"] = json!(rep.passed());
            cfg.emit(&doc, csv)?;
            match rep.passed() {
                true => Ok(()),
                false => Err(CliError::Verification(rep.failures.join("; "))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_strings_parse_back() {
        let pts = [Gr::zero(), Gr::one()];
        let s = factored(&Gr::ratio(1, 2), &pts, &[2, -3]);
        assert_eq!(s, "(1/2)*z^2*(z - (1))^-3");
        let f: RationalFunction = s.parse().unwrap();
        let want = RationalFunction::from_linear_factors(Gr::ratio(1, 2), &[(Gr::zero(), 2), (Gr::one(), -3)]);
        assert_eq!(f, want);
    }

    #[test]
    fn scales() {
        assert_eq!(parse_scale(Some("virasoro")).unwrap(), Some(Gr::ratio(-1, 12)));
        assert_eq!(parse_scale(Some("2")).unwrap(), Some(Gr::from_integer(2)));
        assert!(parse_scale(Some("x")).is_err());
    }
}
