use std::fmt::Write as _;
use std::path::Path;

use alint::analysis::{self, MixtureError};
use alint::gen::Generator;
use alint::parser::{self, parse_formula, structure_to_json, weights_to_text};
use alint::proof::{check_proof, soundness_probe};
use alint::semantics::{
    check_condition, tuple_from_index, validate_structure, value_report, Environment, FiniteChargedStructure,
    ValidationOptions,
};
use alint::syntax::{free_vars, Formula, FormulaEnumerator, Signature};
use alint::ultramean::{build_powermean, build_ultramean, verify_los, UltrachargeSpace};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, InputError};
use crate::{Cli, Command};

/// Output of a successful run: status 0 or 1 and the text to print.
pub struct Report {
    pub status: i32,
    pub text: String,
}

fn emit(cli: &Cli, ok: bool, value: &impl Serialize, text: impl FnOnce() -> String) -> Report {
    let text = if cli.global.json {
        let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
        s.push('\n');
        s
    } else {
        text()
    };
    Report { status: if ok { 0 } else { 1 }, text }
}

fn semantic<E: std::fmt::Display>(e: E) -> InputError {
    InputError(e.to_string())
}

pub fn run(cli: &Cli) -> Result<Report, InputError> {
    let sig_file = input::signature(cli.global.signature.as_deref())?;
    let sig = sig_file.as_ref();
    match &cli.command {
        Command::Validate { structures, mass_le_one, pseudometric } => {
            let opts = ValidationOptions { allow_submass: *mass_le_one, allow_pseudometric: *pseudometric };
            let mut results = Vec::new();
            for path in structures {
                let (s_sig, s) = input::structure(sig, path)?;
                let violations = validate_structure(&s_sig, &s, opts);
                results.push((path.display().to_string(), violations));
            }
            let ok = results.iter().all(|(_, v)| v.is_empty());
            let value: Vec<Value> =
                results.iter().map(|(f, v)| json!({"file": f, "valid": v.is_empty(), "violations": v})).collect();
            Ok(emit(cli, ok, &value, || {
                let mut out = String::new();
                for (f, v) in &results {
                    if v.is_empty() {
                        let _ = writeln!(out, "{f}: valid");
                    } else {
                        let _ = writeln!(out, "{f}: {} violation(s)", v.len());
                        for x in v {
                            let _ = writeln!(out, "  {x}");
                        }
                    }
                }
                out
            }))
        }
        Command::Eval { structure, formula, at, trace } => {
            let (s_sig, s) = input::structure(sig, structure)?;
            let phi = parse_formula(&s_sig, formula)?;
            let env = input::assignment(&s, at)?;
            let report = value_report(&s_sig, &s, &phi, &env, *trace).map_err(semantic)?;
            Ok(emit(cli, true, &report, || {
                let mut out = format!("{}\n", report.value);
                for t in &report.trace {
                    let _ = writeln!(out, "  {} = {}", t.formula, t.value);
                }
                out
            }))
        }
        Command::Check { structure, theory } => {
            let (s_sig, s) = input::structure(sig, structure)?;
            let conds = input::theory(&s_sig, theory)?;
            let mut rows = Vec::new();
            for c in &conds {
                let r = check_condition(&s, c).map_err(semantic)?;
                rows.push((c.to_string(), r));
            }
            let ok = rows.iter().all(|(_, r)| r.holds);
            let value: Vec<Value> = rows
                .iter()
                .map(|(c, r)| json!({"condition": c, "holds": r.holds, "margin": r.margin, "witness": witness(&s, &r.witness)}))
                .collect();
            Ok(emit(cli, ok, &value, || {
                let mut out = String::new();
                for (c, r) in &rows {
                    let verdict = if r.holds { "holds" } else { "FAILS" };
                    let _ = write!(out, "{verdict}  {c}  (margin {})", r.margin);
                    if !r.holds && !r.witness.is_empty() {
                        let _ = write!(out, " at {}", witness_text(&s, &r.witness));
                    }
                    out.push('\n');
                }
                out
            }))
        }
        Command::Ultramean { weights, structures, output } => {
            let ws = UltrachargeSpace::new(input::weights(weights)?).map_err(semantic)?;
            let (s_sig, models) = input::structures(sig, structures)?;
            let cap = input::product_cap(cli.global.product_cap)?;
            let u = build_ultramean(&s_sig, &ws, &models, cap).map_err(semantic)?;
            write_structure(&s_sig, &u.structure, output.as_deref())
        }
        Command::Powermean { weights, structure, output } => {
            let ws = UltrachargeSpace::new(input::weights(weights)?).map_err(semantic)?;
            let (s_sig, m) = input::structure(sig, structure)?;
            let cap = input::product_cap(cli.global.product_cap)?;
            let u = build_powermean(&s_sig, &ws, &m, cap).map_err(semantic)?;
            write_structure(&s_sig, &u.structure, output.as_deref())
        }
        Command::VerifyLos { weights, structures, formulas, depth, vars } => {
            let ws = UltrachargeSpace::new(input::weights(weights)?).map_err(semantic)?;
            let (s_sig, models) = input::structures(sig, structures)?;
            let cap = input::product_cap(cli.global.product_cap)?;
            let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
            let family = match formulas {
                Some(p) => input::formulas(&s_sig, p)?,
                None => FormulaEnumerator::new(&s_sig, &vars, &FormulaEnumerator::default_scalars()).up_to_depth(*depth),
            };
            check_family_vars(&family, &vars)?;
            let u = build_ultramean(&s_sig, &ws, &models, cap).map_err(semantic)?;
            let report = verify_los(&u, &models, &family, &vars).map_err(semantic)?;
            Ok(emit(cli, report.holds(), &report, || {
                let mut out = format!(
                    "{} formulas x {} tuples: max residual {}\n",
                    report.formulas, report.tuples, report.max_residual
                );
                if let Some(w) = &report.worst {
                    let _ = writeln!(out, "worst: {} at {:?}: ultramean {} vs average {}", w.formula, w.tuple, w.ultramean, w.average);
                }
                out
            }))
        }
        Command::CheckProof { proof, models, random_models, seed } => {
            let text = input::read(proof)?;
            let script = match sig {
                Some(sig) => parser::parse_proof(sig, &text),
                None => parser::parse_proof_with_signature(&text),
            }
            .map_err(|e| InputError(format!("{}: {e}", proof.display())))?;
            let verdict = check_proof(&script);
            let mut fleet = Vec::new();
            if let Some(dir) = models {
                for p in input::model_dir(dir)? {
                    fleet.push(input::structure(Some(&script.signature), &p)?.1);
                }
            }
            if let (Some(n), Some(seed)) = (random_models, seed) {
                if !script.signature.functions().iter().all(|f| f.lipschitz >= alint::Q::one())
                    || !script.signature.relations().iter().all(|r| r.lipschitz >= alint::Q::one())
                {
                    return Err(InputError("--random-models needs Lipschitz constants of at least 1".into()));
                }
                let mut g = Generator::with_signature(*seed, script.signature.clone());
                fleet.extend((0..*n).map(|_| g.structure(4)));
            }
            let soundness = if verdict.accepted && !fleet.is_empty() {
                Some(soundness_probe(&script, &fleet).expect("accepted scripts probe"))
            } else {
                None
            };
            let ok = verdict.accepted && soundness.as_ref().is_none_or(|r| r.sound);
            let value = json!({"verdict": verdict, "soundness": soundness});
            Ok(emit(cli, ok, &value, || {
                let mut out = String::new();
                for st in &verdict.steps {
                    match &st.failure {
                        None => {
                            let _ = writeln!(out, "ok    {:>3}  {}", st.id, st.condition);
                        }
                        Some(f) => {
                            let _ = writeln!(out, "FAIL  {:>3}  {}  [{}] {f}", st.id, st.condition, f.name());
                        }
                    }
                }
                match &verdict.first_failure {
                    None => out.push_str("accepted\n"),
                    Some(f) => {
                        let _ = writeln!(out, "rejected at step {}: {}", f.step, f.failure.name());
                    }
                }
                if let Some(r) = &soundness {
                    let vacuous = r.models.iter().filter(|m| m.vacuous).count();
                    let _ = writeln!(
                        out,
                        "soundness probe: {} model(s), {vacuous} vacuous, {} violation(s)",
                        r.models.len(),
                        r.violations.len()
                    );
                }
                out
            }))
        }
        Command::SolveMixture { models, theory, weights_out } => {
            let paths = input::model_dir(models)?;
            let (s_sig, fleet) = input::structures(sig, &paths)?;
            let conds = input::theory(&s_sig, theory)?;
            let cap = input::product_cap(cli.global.product_cap)?;
            match analysis::solve_mixture(&s_sig, &fleet, &conds, cap) {
                Ok(sol) => {
                    if let Some(out) = weights_out {
                        input::write(out, &weights_to_text(&sol.weights))?;
                    }
                    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                    let value = json!({"feasible": true, "models": names, "solution": sol});
                    Ok(emit(cli, true, &value, || {
                        let mut out = String::from("feasible\n");
                        for (n, w) in names.iter().zip(&sol.weights) {
                            let _ = writeln!(out, "  {w}  {n}");
                        }
                        out
                    }))
                }
                Err(e @ MixtureError::Infeasible { .. }) => {
                    let value = json!({"feasible": false, "reason": e.to_string()});
                    Ok(emit(cli, false, &value, || format!("infeasible: {e}\n")))
                }
                Err(MixtureError::Eval(e)) => Err(semantic(e)),
                Err(MixtureError::OpenCondition { index }) => {
                    Err(InputError(format!("{}: condition {} is not a sentence", theory.display(), index + 1)))
                }
                Err(e) => Err(semantic(e)),
            }
        }
        Command::CheckFubini { structure, formula, x, y, at } => {
            let (s_sig, s) = input::structure(sig, structure)?;
            let phi = parse_formula(&s_sig, formula)?;
            let fixed = input::assignment(&s, at)?;
            let rest: Vec<String> = free_vars(&phi)
                .into_iter()
                .filter(|v| v != x && v != y && fixed.get(v).is_none())
                .collect();
            let envs: Vec<Environment> = (0..s.len().pow(rest.len() as u32))
                .map(|idx| {
                    let mut env = fixed.clone();
                    for (v, a) in rest.iter().zip(tuple_from_index(s.len(), rest.len(), idx)) {
                        env.insert(v, a);
                    }
                    env
                })
                .collect();
            let report = analysis::check_fubini(&s, &phi, x, y, &envs).map_err(semantic)?;
            Ok(emit(cli, report.max_residual.is_zero(), &report, || {
                let mut out = format!("{} assignment(s): max residual {}\n", report.cases.len(), report.max_residual);
                for c in &report.cases {
                    let _ = writeln!(out, "  {:?}: {} vs {}", c.assignment, c.xy, c.yx);
                }
                out
            }))
        }
        Command::TypeOf { structure, at, formulas, depth, compare } => {
            let (s_sig, s) = input::structure(sig, structure)?;
            let mut vars = Vec::new();
            let mut tuple = Vec::new();
            for pair in &input::split_list(at) {
                let (v, p) = pair.split_once('=').ok_or_else(|| InputError(format!("expected VAR=POINT, got `{pair}`")))?;
                vars.push(v.trim().to_string());
                tuple.push(input::point(&s, p)?);
            }
            let var_refs: Vec<&str> = vars.iter().map(String::as_str).collect();
            let family = match formulas {
                Some(p) => input::formulas(&s_sig, p)?,
                None => FormulaEnumerator::new(&s_sig, &var_refs, &FormulaEnumerator::default_scalars()).up_to_depth(*depth),
            };
            check_family_vars(&family, &var_refs)?;
            let p = analysis::realized_type(&s, &vars, &tuple, &family).map_err(semantic)?;
            let laws = p.check_laws(&s).map_err(semantic)?;
            let distance = if compare.is_empty() {
                None
            } else {
                if input::split_list(compare).len() != tuple.len() {
                    return Err(InputError(format!("--compare needs {} point(s)", tuple.len())));
                }
                let other = input::split_list(compare).iter().map(|k| input::point(&s, k)).collect::<Result<Vec<_>, _>>()?;
                Some(analysis::type_distance(&s_sig, &s, &tuple, &other, *depth).map_err(semantic)?)
            };
            let value = json!({"type": p, "laws": laws, "distance": distance});
            let ok = laws.unit && laws.positive && laws.linear;
            Ok(emit(cli, ok, &value, || {
                let mut out = String::new();
                for (f, v) in &p.entries {
                    let _ = writeln!(out, "{v}\t{f}");
                }
                let _ = writeln!(out, "unit {} positive {} linear {}", laws.unit, laws.positive, laws.linear);
                if let Some(d) = &distance {
                    let exact = if d.exact { "" } else { " (classes coarser than orbits)" };
                    let _ = writeln!(out, "type distance {}{exact}", d.distance);
                }
                out
            }))
        }
        Command::ElemCheck { source, target, map, depth, vars, budget } => {
            let (s_sig, m) = input::structure(sig, source)?;
            let (_, n) = input::structure(Some(&s_sig), target)?;
            let f = if map.is_empty() {
                (0..m.len()).collect()
            } else {
                input::split_list(map).iter().map(|k| input::point(&n, k)).collect::<Result<Vec<_>, _>>()?
            };
            let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
            let report =
                analysis::bounded_elementary_check(&s_sig, &m, &n, &f, &vars, *depth, *budget).map_err(semantic)?;
            Ok(emit(cli, report.violation_count == 0, &report, || {
                let mut out = format!(
                    "{} formulas x {} tuples: {} violation(s)\n",
                    report.formulas, report.tuples, report.violation_count
                );
                for v in &report.violations {
                    let _ = writeln!(out, "  {} at {:?}: {} vs {}", v.formula, v.tuple, v.source, v.target);
                }
                out
            }))
        }
    }
}

fn check_family_vars(family: &[Formula], vars: &[&str]) -> Result<(), InputError> {
    for phi in family {
        if let Some(v) = free_vars(phi).into_iter().find(|v| !vars.contains(&v.as_str())) {
            return Err(InputError(format!("`{phi}` has free variable `{v}` outside {vars:?}")));
        }
    }
    Ok(())
}

fn write_structure(sig: &Signature, s: &FiniteChargedStructure, output: Option<&Path>) -> Result<Report, InputError> {
    let embedded = (!sig.is_empty()).then_some(sig);
    let text = structure_to_json(embedded, s);
    match output {
        Some(p) => {
            input::write(p, &text)?;
            Ok(Report { status: 0, text: String::new() })
        }
        None => Ok(Report { status: 0, text }),
    }
}

fn witness(s: &FiniteChargedStructure, w: &[(String, usize)]) -> Value {
    w.iter().map(|(x, a)| (x.clone(), Value::from(s.label(*a)))).collect::<serde_json::Map<_, _>>().into()
}

fn witness_text(s: &FiniteChargedStructure, w: &[(String, usize)]) -> String {
    w.iter().map(|(x, a)| format!("{x}={}", s.label(*a))).collect::<Vec<_>>().join(",")
}
