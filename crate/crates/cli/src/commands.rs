use std::path::Path;

use serde::Serialize;
use serde_json::json;

use sullivan::cohomology::{verify_classes, Cohomology, CohomologyError};
use sullivan::dsl::{parse_bytes, parse_element, serialize_cdga, serialize_lie, Diagnostic};
use sullivan::models::{
    borel_twist, c_formula, d_formula, degree_shift, principal_obstruction, split_at_k,
    upper_tri_model, xr_row, ModelError, MAX_UPPER_TRI,
};
use sullivan::trc::{
    certificate_product, default_k, first_non_decrease, ratio_table, scan_min_crossover,
    trc_inequality, TrcError, SCOPE_NOTE,
};
use sullivan::{Cdga, Element, Error, LiePresentation};

use crate::builtin::{self, Builtin};
use crate::report::{Outcome, Table};
use crate::{Cli, Command, Failure, Source};

pub const MAX_GENERATORS: usize = 24;
pub const MAX_TRUNCATION: u32 = 40;
pub const MAX_TABLE_R: usize = 9;
/// Largest `n` for the factorial commands without `--unsafe-large`.
pub const MAX_FACTORIAL_N: usize = 2000;

pub enum Done {
    Report(Outcome),
    Text(String),
}

fn internal(e: &Error) -> bool {
    let coh = |c: &CohomologyError| matches!(c, CohomologyError::Internal(_));
    let model = |m: &ModelError| matches!(m, ModelError::Cohomology(c) if coh(c));
    match e {
        Error::Linalg(_) => true,
        Error::Cohomology(c) => coh(c),
        Error::Model(m) => model(m),
        Error::Trc(TrcError::Cohomology(c)) => coh(c),
        Error::Trc(TrcError::Model(m)) => model(m),
        _ => false,
    }
}

fn engine<E: Into<Error>>(e: E) -> Failure {
    let e = e.into();
    if internal(&e) {
        Failure::Internal(e.to_string())
    } else {
        Failure::Usage(e.to_string())
    }
}

fn report_diagnostics(path: &Path, diags: &[Diagnostic]) -> Failure {
    let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
    Failure::Usage(lines.join("\n"))
}

/// Resolves a source; for files, `prefer_lie` picks the Lie section when
/// both are present.
fn load(src: &Source, prefer_lie: bool) -> Result<(String, Builtin), Failure> {
    if let Some(name) = &src.builtin {
        return Ok((name.clone(), builtin::resolve(name)?));
    }
    let path = src.file.as_ref().expect("clap requires a source");
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let doc = parse_bytes(&bytes).map_err(|d| report_diagnostics(path, &d))?;
    let label = path.display().to_string();
    let lie = doc.lie().map_err(|e| Failure::Usage(format!("{label}: {e}")))?;
    let cdga = doc.cdga().map_err(|e| Failure::Usage(format!("{label}: {e}")))?;
    let chosen = match (cdga, lie) {
        (Some(_), Some(l)) if prefer_lie => Builtin::Lie(l),
        (Some(c), _) => Builtin::Algebra(c),
        (None, Some(l)) => Builtin::Lie(l),
        (None, None) => unreachable!("the parser requires a header"),
    };
    Ok((label, chosen))
}

fn guard(cli: &Cli, c: &Cdga) -> Result<(), Failure> {
    if cli.unsafe_large {
        return Ok(());
    }
    let n = c.signature().len();
    if n > MAX_GENERATORS {
        return Err(Failure::Usage(format!(
            "model has {n} generators, above the limit of {MAX_GENERATORS} (pass --unsafe-large to override)"
        )));
    }
    if let Some(t) = c.truncation() {
        if t > MAX_TRUNCATION {
            return Err(Failure::Usage(format!(
                "truncation {t} exceeds the limit of {MAX_TRUNCATION} (pass --unsafe-large to override)"
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Generator {
    name: String,
    degree: u32,
}

fn generators(c: &Cdga) -> Vec<Generator> {
    c.signature()
        .generators()
        .iter()
        .map(|g| Generator {
            name: g.name().to_string(),
            degree: g.degree(),
        })
        .collect()
}

fn fresh_name(c: &Cdga, stem: &str) -> String {
    let sig = c.signature();
    std::iter::once(stem.to_string())
        .chain((1..).map(|i| format!("{stem}_{i}")))
        .find(|n| sig.index_of(n).is_none())
        .expect("some name is free")
}

pub fn run(cli: &Cli) -> Result<Done, Failure> {
    let outcome = match &cli.command {
        Command::Cohomology {
            source,
            representatives,
            truncate,
            twist,
        } => cohomology(cli, source, *representatives, *truncate, twist.as_deref())?,
        Command::Table1 { max_r } => table1(cli, *max_r)?,
        Command::Trc { n, k, scan_min, max_n } => match n {
            Some(n) if !scan_min => trc(cli, *n, *k)?,
            _ => scan(cli, *max_n)?,
        },
        Command::Ratio { from, to } => ratio(cli, *from, *to)?,
        Command::Certificate { r, product } => {
            let factors = match r {
                Some(r) => vec![*r],
                None => product.clone(),
            };
            certificate(cli, &factors)?
        }
        Command::Split { n, k } => split(cli, *n, *k)?,
        Command::Obstruction { source, rank, fiber } => obstruction(cli, source, *rank, fiber)?,
        Command::Center { source } => center(source)?,
        Command::Shift { n, kappa } => shift(cli, *n, *kappa)?,
        Command::VerifyClasses { source, classes, class } => {
            verify(cli, source, classes.as_deref(), class)?
        }
        Command::Export { builtin } => return export(builtin).map(Done::Text),
    };
    Ok(Done::Report(outcome))
}

fn cohomology(
    cli: &Cli,
    source: &Source,
    with_reps: bool,
    truncate: Option<u32>,
    twist: Option<&str>,
) -> Result<Outcome, Failure> {
    let (label, b) = load(source, false)?;
    let mut c = b.into_cdga()?;
    let mut notes = Vec::new();
    if let Some(g) = twist {
        let t = fresh_name(&c, "t");
        c = borel_twist(&c, g, &t, truncate).map_err(engine)?;
        notes.push(format!("twisted: d {g} gains + {t}"));
    } else if let Some(t) = truncate {
        if c.signature().is_purely_odd() {
            notes.push("--truncate ignored: the model has no even generators".to_string());
        } else {
            c = c.with_truncation(Some(t));
        }
    }
    guard(cli, &c)?;
    let coh = Cohomology::new(&c).map_err(engine)?;
    let table = coh.betti().map_err(engine)?;
    let reps = if with_reps {
        let mut all = Vec::new();
        for n in 0..=coh.top_degree() {
            let r = coh.representatives(n).map_err(engine)?;
            all.push(r.iter().map(Element::to_string).collect::<Vec<_>>());
        }
        Some(all)
    } else {
        None
    };
    let mut t = if with_reps {
        Table::new(&["degree", "betti", "representatives"])
    } else {
        Table::new(&["degree", "betti"])
    };
    for (k, b) in table.per_degree.iter().enumerate() {
        let mut row = vec![k.to_string(), b.to_string()];
        if let Some(reps) = &reps {
            row.push(reps[k].join("; "));
        }
        t.row(row);
    }
    t.row(["total".to_string(), table.total.to_string()]);
    let outputs = json!({
        "model": label,
        "generators": generators(&c),
        "truncation": c.truncation(),
        "betti": table,
        "representatives": reps,
    });
    let mut out = Outcome::new(json!({ "source": label, "truncate": truncate, "twist": twist }), outputs, t);
    out.notes = notes;
    Ok(out)
}

fn table1(cli: &Cli, max_r: usize) -> Result<Outcome, Failure> {
    if max_r > MAX_TABLE_R && !cli.unsafe_large {
        return Err(Failure::Usage(format!(
            "--max-r {max_r} exceeds {MAX_TABLE_R} (pass --unsafe-large to override)"
        )));
    }
    let rows = (0..=max_r).map(xr_row).collect::<Result<Vec<_>, _>>().map_err(engine)?;
    let mut t = Table::new(&["r", "2^r", "dim H*(X_r)", "reference", "below 2^r"]);
    for row in &rows {
        t.row([
            row.r.to_string(),
            row.torus_bound.to_string(),
            row.total.to_string(),
            row.reference.map_or(String::new(), |x| x.to_string()),
            row.below_bound.to_string(),
        ]);
    }
    let violated = rows.iter().any(|row| row.r > 0 && row.matches_reference == Some(false));
    let mut out = Outcome::new(json!({ "max_r": max_r }), &rows, t);
    out.notes = rows.iter().filter_map(|r| r.note).map(str::to_string).collect();
    out.violated = violated;
    Ok(out)
}

fn check_factorial_n(cli: &Cli, n: usize) -> Result<(), Failure> {
    if n > MAX_FACTORIAL_N && !cli.unsafe_large {
        return Err(Failure::Usage(format!(
            "n = {n} exceeds {MAX_FACTORIAL_N} (pass --unsafe-large to override)"
        )));
    }
    Ok(())
}

fn trc(cli: &Cli, n: usize, k: Option<usize>) -> Result<Outcome, Failure> {
    check_factorial_n(cli, n)?;
    let k = k.unwrap_or_else(|| default_k(n));
    let cert = trc_inequality(n, k).and_then(|c| c.with_computed_betti()).map_err(engine)?;
    let value = serde_json::to_value(&cert).expect("certificate serializes");
    let t = Table::key_value(&value);
    Ok(Outcome::new(json!({ "n": n, "k": k }), value, t))
}

fn scan(cli: &Cli, max_n: usize) -> Result<Outcome, Failure> {
    check_factorial_n(cli, max_n)?;
    let s = scan_min_crossover(max_n).map_err(engine)?;
    let mut t = Table::new(&["n", "k", "d(n,k)", "n! < 2^d"]);
    for n in 2..=max_n {
        let k = default_k(n);
        let d = d_formula(n, k).map_err(engine)?;
        t.row([n.to_string(), k.to_string(), d.to_string(), s.holds_at.contains(&n).to_string()]);
    }
    Ok(Outcome::new(json!({ "max_n": max_n, "k": "ceil(n/2)+1" }), &s, t).note(SCOPE_NOTE))
}

fn ratio(cli: &Cli, from: usize, to: usize) -> Result<Outcome, Failure> {
    if from < 2 || from > to {
        return Err(Failure::Usage(format!("need 2 <= from <= to, got {from}..{to}")));
    }
    check_factorial_n(cli, to)?;
    let entries = ratio_table(from..=to).map_err(engine)?;
    let miss = first_non_decrease(&entries);
    let mut t = Table::new(&["n", "k", "ratio"]);
    for e in &entries {
        t.row([e.n.to_string(), e.k.to_string(), e.decimal.clone()]);
    }
    let outputs = json!({
        "entries": entries,
        "strictly_decreasing": miss.is_none(),
        "first_non_decrease": miss,
    });
    let mut out = Outcome::new(json!({ "from": from, "to": to, "k": "ceil(n/2)+1" }), outputs, t);
    if let Some((a, b)) = miss {
        out.notes.push(format!("the ratio does not decrease from n = {a} to n = {b}"));
        out.violated = true;
    }
    Ok(out)
}

fn certificate(cli: &Cli, factors: &[usize]) -> Result<Outcome, Failure> {
    if factors.is_empty() {
        return Err(Failure::Usage("no factors given".into()));
    }
    if factors.iter().any(|&r| r > 62) {
        return Err(Failure::Usage("each factor must be at most 62".into()));
    }
    let gens: usize = factors.iter().map(|r| r + 2).sum();
    if gens > MAX_GENERATORS && !cli.unsafe_large {
        return Err(Failure::Usage(format!(
            "the product has {gens} generators, above the limit of {MAX_GENERATORS} (pass --unsafe-large to override)"
        )));
    }
    let cert = certificate_product(factors).map_err(engine)?;
    let value = serde_json::to_value(&cert).expect("certificate serializes");
    let t = Table::key_value(&value);
    Ok(Outcome::new(json!({ "factors": factors }), value, t).note(SCOPE_NOTE))
}

fn split(cli: &Cli, n: usize, k: usize) -> Result<Outcome, Failure> {
    let f = split_at_k(n, k).map_err(engine)?;
    let d = d_formula(n, k).map_err(engine)?;
    let c = c_formula(n, k).map_err(engine)?;
    let names = |m: &Cdga| generators(m).into_iter().map(|g| g.name).collect::<Vec<_>>();
    let fsig = f.fiber.signature();
    let nonzero: Vec<String> = fsig
        .generators()
        .iter()
        .zip(f.fiber.differential())
        .filter(|(_, e)| !e.is_zero())
        .map(|(g, e)| format!("d {} = {e}", g.name()))
        .collect();
    let fiber_betti = if fsig.len() <= MAX_GENERATORS || cli.unsafe_large {
        Some(Cohomology::new(&f.fiber).and_then(|h| h.betti()).map_err(engine)?.total)
    } else {
        None
    };
    let two_d = 1u128.checked_shl(d as u32).map(|x| x.to_string());
    let outputs = json!({
        "n": n,
        "k": k,
        "d_nk": d,
        "c_nk": c,
        "base_generators": names(&f.base),
        "fiber_generators": names(&f.fiber),
        "fiber_is_abelian": f.fiber_is_abelian(),
        "fiber_differential": nonzero,
        "fiber_betti_total": fiber_betti,
        "two_pow_d": two_d,
    });
    let t = Table::key_value(&outputs);
    Ok(Outcome::new(json!({ "n": n, "k": k }), outputs, t))
}

fn obstruction(cli: &Cli, source: &Source, rank: usize, fiber: &[String]) -> Result<Outcome, Failure> {
    if rank == 0 {
        return Err(Failure::Usage("--rank must be positive".into()));
    }
    let (label, b) = load(source, false)?;
    let c = b.into_cdga()?;
    guard(cli, &c)?;
    let fiber: Vec<&str> = fiber.iter().map(String::as_str).collect();
    let rep = principal_obstruction(&c, &fiber, rank).map_err(engine)?;
    let mut t = Table::new(&["generator", "twist"]);
    for g in &rep.forced_generators {
        t.row([g.as_str(), "forced to zero"]);
    }
    for g in &rep.free_generators {
        t.row([g.as_str(), "free"]);
    }
    Ok(Outcome::new(json!({ "source": label, "rank": rank, "fiber": fiber }), &rep, t))
}

fn center(source: &Source) -> Result<Outcome, Failure> {
    let (label, b) = load(source, true)?;
    let l: LiePresentation = b.into_lie()?;
    let z = l.center();
    let mut t = Table::new(&["central element"]);
    for e in &z.display {
        t.row([e]);
    }
    let outputs = json!({
        "lie_dimension": l.dim(),
        "nilpotency_class": l.nilpotency_class(),
        "center": z,
    });
    Ok(Outcome::new(json!({ "source": label }), outputs, t))
}

fn shift(cli: &Cli, n: usize, kappa: u32) -> Result<Outcome, Failure> {
    if !(2..=MAX_UPPER_TRI).contains(&n) {
        return Err(Failure::Usage(format!("n must lie in 2..={MAX_UPPER_TRI}")));
    }
    let original = upper_tri_model(n);
    guard(cli, &original)?;
    let shifted = degree_shift(&original, kappa).map_err(engine)?;
    let before = sullivan::betti(&original).map_err(engine)?;
    let after = sullivan::betti(&shifted).map_err(engine)?;
    let nonzero = |b: &sullivan::BettiTable| {
        b.per_degree
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(k, x)| format!("{k}:{x}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut t = Table::new(&["model", "total", "nonzero degrees"]);
    t.row([format!("u({n})"), before.total.to_string(), nonzero(&before)]);
    t.row([format!("u({n}) shifted by {kappa}"), after.total.to_string(), nonzero(&after)]);
    let equal = before.total == after.total;
    let outputs = json!({
        "n": n,
        "kappa": kappa,
        "generators": generators(&shifted),
        "original": before,
        "shifted": after,
        "totals_equal": equal,
    });
    let mut out = Outcome::new(json!({ "n": n, "kappa": kappa }), outputs, t);
    out.violated = !equal;
    Ok(out)
}

fn verify(cli: &Cli, source: &Source, file: Option<&Path>, inline: &[String]) -> Result<Outcome, Failure> {
    let (label, b) = load(source, false)?;
    let c = b.into_cdga()?;
    guard(cli, &c)?;
    let mut texts: Vec<(String, String)> = Vec::new();
    if let Some(path) = file {
        let body = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        for (i, line) in body.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                texts.push((format!("{}:{}", path.display(), i + 1), line.to_string()));
            }
        }
    }
    for (i, s) in inline.iter().enumerate() {
        texts.push((format!("--class #{}", i + 1), s.clone()));
    }
    if texts.is_empty() {
        return Err(Failure::Usage("no classes given (use --classes FILE or --class EXPR)".into()));
    }
    let mut elems = Vec::new();
    let mut errors = Vec::new();
    for (origin, text) in &texts {
        match parse_element(c.signature(), text) {
            Ok(e) => elems.push(e),
            Err(diags) => errors.extend(diags.iter().map(|d| format!("{origin}: {}", d.message))),
        }
    }
    if !errors.is_empty() {
        return Err(Failure::Usage(errors.join("\n")));
    }
    let verdict = verify_classes(&c, &elems).map_err(engine)?;
    let mut t = Table::new(&["degree", "independent classes", "betti"]);
    for (k, given, b) in &verdict.per_degree {
        t.row([k.to_string(), given.to_string(), b.to_string()]);
    }
    let ok = verdict.all_closed && verdict.independent && verdict.spanning;
    let mut out = Outcome::new(json!({ "source": label, "classes": elems.len() }), &verdict, t);
    if let Some(i) = verdict.non_closed {
        out.notes.push(format!("{} is not closed", texts[i].0));
    }
    if let Some(dep) = &verdict.dependency {
        let parts: Vec<String> = dep.iter().map(|(i, c)| format!("{c}·[{}]", texts[*i].0)).collect();
        out.notes.push(format!("dependent: {} = 0", parts.join(" + ")));
    }
    if let Some(k) = verdict.missing_degree {
        out.notes.push(format!("classes do not span degree {k}"));
    }
    out.violated = !ok;
    Ok(out)
}

fn export(name: &str) -> Result<String, Failure> {
    let ident: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    Ok(match builtin::resolve(name)? {
        Builtin::Algebra(c) => serialize_cdga(&c, &ident),
        Builtin::Lie(l) => serialize_lie(&l, &ident),
    })
}
