use std::fmt::Write as _;

use cartan_eds::catalog::{identify_catalog, selftest, Catalog, CatalogError};
use cartan_eds::contact::{
    build_contact_system, cauchy_char_field, integrability_check, jacobi_bracket, lagrange_bracket,
    lie_field_from_hamiltonian, prolong_vector_field, restrict_system, structure_congruences, ContactChart,
    Hamiltonian, IntegrabilityVerdict, PdeSystem, Residue,
};
use cartan_eds::formlang::{parse_rational, render_document, Severity, SystemDocument};
use cartan_eds::pfaffian::{
    cartan_class, cartan_class_at, cauchy_characteristic_system, character_chain, darboux_class as form_darboux_class,
    derived_flag, derived_system, form_gender, gender as system_gender, generic_point, is_integrable_frobenius,
    polar_space, singularity_scan, ChainStrategy,
};
use cartan_eds::poly::render_rational;
use cartan_eds::{EdsError, Form, PfaffianSystem, PointAssignment, RationalFunction};
use num::BigRational;
use serde_json::{json, Value};

use crate::{CliError, Outcome, Strategy};

type Run = Result<Outcome, CliError>;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn vector_text(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(render_rational).collect();
    format!("({})", parts.join(", "))
}

fn vector_json(v: &[BigRational]) -> Value {
    Value::from(v.iter().map(render_rational).collect::<Vec<_>>())
}

fn lookup<'a, T>(found: Option<&'a T>, kind: &str, name: &str) -> Result<&'a T, CliError>
where
    T: ?Sized,
{
    found.ok_or_else(|| CliError::usage(format!("no {kind} named {name}"), Some(&format!("{kind} {name}"))))
}

fn system(doc: &SystemDocument, name: &str) -> Result<PfaffianSystem, CliError> {
    let gens = lookup(doc.system(name), "system", name)?;
    PfaffianSystem::new(&doc.chart, gens.to_vec()).map_err(CliError::math(format!("system {name}")))
}

fn point(doc: &SystemDocument, name: &str) -> Result<PointAssignment, CliError> {
    lookup(doc.point(name), "point", name).cloned()
}

fn contact_chart(doc: &SystemDocument) -> Result<ContactChart, CliError> {
    ContactChart::from_chart(&doc.chart).map_err(CliError::math("coords"))
}

fn hamiltonian(doc: &SystemDocument, cc: &ContactChart, name: &str) -> Result<Hamiltonian, CliError> {
    let f = lookup(doc.function(name), "function", name)?;
    Hamiltonian::new(cc, f.clone()).map_err(CliError::math(format!("function {name}")))
}

fn generator<'a>(doc: &'a SystemDocument, sys: &str, k: usize) -> Result<&'a Form, CliError> {
    let gens = lookup(doc.system(sys), "system", sys)?;
    if k == 0 || k > gens.len() {
        return Err(CliError::usage(
            format!("generator index {k} is out of range 1..{}", gens.len()),
            Some(&format!("system {sys}")),
        ));
    }
    Ok(&gens[k - 1])
}

pub fn derived(doc: &SystemDocument, name: &str) -> Run {
    let p = system(doc, name)?;
    let d = derived_system(&p).map_err(CliError::math(format!("system {name}")))?;
    let gens = d.render();
    let integrable = is_integrable_frobenius(&d);
    let text = format!(
        "system: {name}\nderived generators: {}\nrank: {}\nintegrable: {}\n",
        braces(&gens),
        d.rank(),
        yes_no(integrable)
    );
    let result = json!({
        "system": name,
        "generators": gens,
        "rank": d.rank(),
        "integrable": integrable,
    });
    Ok(Outcome::new(text, result))
}

pub fn flag(doc: &SystemDocument, name: &str) -> Run {
    let p = system(doc, name)?;
    let flag = derived_flag(&p).map_err(CliError::math(format!("system {name}")))?;
    let mut text = format!("system: {name}\n");
    let mut stages = Vec::new();
    for (k, stage) in flag.stages.iter().enumerate() {
        let gens = stage.render();
        let integrable = is_integrable_frobenius(stage);
        let _ = writeln!(
            text,
            "stage {k}: rank {}, integrable: {}, {}",
            stage.rank(),
            yes_no(integrable),
            braces(&gens)
        );
        stages.push(json!({"rank": stage.rank(), "integrable": integrable, "generators": gens}));
    }
    let ranks = flag.ranks();
    let rank_text: Vec<String> = ranks.iter().map(usize::to_string).collect();
    let _ = writeln!(text, "ranks: {}", rank_text.join(" "));
    let result = json!({
        "system": name,
        "stages": stages,
        "ranks": ranks,
        "terminal_integrable": flag.terminal_integrable,
    });
    Ok(Outcome::new(text, result))
}

pub fn characteristic(doc: &SystemDocument, name: &str) -> Run {
    let p = system(doc, name)?;
    let c = cauchy_characteristic_system(&p).map_err(CliError::math(format!("system {name}")))?;
    let gens = c.render();
    let text = format!(
        "system: {name}\ncharacteristic system: {}\nclass: {}\n",
        braces(&gens),
        c.rank()
    );
    let result = json!({"system": name, "generators": gens, "class": c.rank()});
    Ok(Outcome::new(text, result))
}

pub fn class(doc: &SystemDocument, name: &str, at: Option<&str>) -> Run {
    let p = system(doc, name)?;
    let math = CliError::math(format!("system {name}"));
    let (class, where_) = match at {
        Some(pt_name) => {
            let pt = point(doc, pt_name)?;
            (cartan_class_at(&p, &pt).map_err(math)?, Some(pt_name))
        }
        None => (cartan_class(&p).map_err(math)?, None),
    };
    let text = match where_ {
        Some(pt) => format!("system: {name}\npoint: {pt}\nclass: {class}\n"),
        None => format!("system: {name}\nclass: {class}\n"),
    };
    Ok(Outcome::new(
        text,
        json!({"system": name, "point": where_, "class": class}),
    ))
}

pub fn darboux_class(doc: &SystemDocument, name: &str, k: usize, at: Option<&str>) -> Run {
    let w = generator(doc, name, k)?;
    let pt = at.map(|n| point(doc, n)).transpose()?;
    let class = form_darboux_class(w, pt.as_ref()).map_err(CliError::math(format!("system {name}, generator {k}")))?;
    let mut text = format!("form: {}\n", w.render());
    if let Some(n) = at {
        let _ = writeln!(text, "point: {n}");
    }
    let _ = writeln!(text, "class: {class}");
    let result = json!({"system": name, "generator": k, "form": w.render(), "point": at, "class": class});
    Ok(Outcome::new(text, result))
}

pub fn gender(doc: &SystemDocument, name: &str, form: Option<(&str, usize)>) -> Run {
    let p = system(doc, name)?;
    let math = CliError::math(format!("system {name}"));
    match form {
        None => {
            let g = system_gender(&p).map_err(math)?;
            let text = format!("system: {name}\ngender: {g}\n");
            Ok(Outcome::new(text, json!({"system": name, "gender": g})))
        }
        Some((section, k)) => {
            let w = generator(doc, section, k)?;
            let g = form_gender(w, &p).map_err(math)?;
            let text = format!("form: {}\nmodulo: {name}\ngender: {g}\n", w.render());
            Ok(Outcome::new(
                text,
                json!({"system": name, "section": section, "generator": k, "form": w.render(), "gender": g}),
            ))
        }
    }
}

pub fn character(doc: &SystemDocument, name: &str, at: Option<&str>, strategy: Strategy, seed: Option<u64>) -> Run {
    let p = system(doc, name)?;
    let strategy = match strategy {
        Strategy::Generic => ChainStrategy::Generic,
        Strategy::FirstBasis => ChainStrategy::FirstBasis,
        Strategy::SeededRandom => ChainStrategy::SeededRandom(seed.ok_or_else(|| {
            CliError::usage(
                "seeded-random strategy needs --seed or CARTAN_EDS_SEED",
                Some("strategy"),
            )
        })?),
    };
    let math = || CliError::math(format!("system {name}"));
    let pt = match at {
        Some(n) => point(doc, n)?,
        None => generic_point(&p).map_err(math())?,
    };
    let report = character_chain(&p, &pt, strategy).map_err(math())?;
    let strategy_name = match strategy {
        ChainStrategy::Generic => "generic".to_string(),
        ChainStrategy::FirstBasis => "first-basis".to_string(),
        ChainStrategy::SeededRandom(s) => format!("seeded-random (seed {s})"),
    };
    let mut text = format!(
        "system: {name}\npoint: {} ({})\nstrategy: {strategy_name}\n",
        at.unwrap_or("generic"),
        pt.render()
    );
    for (j, e) in report.chain.iter().enumerate() {
        let vs: Vec<String> = e.iter().map(|v| vector_text(v)).collect();
        let _ = writeln!(
            text,
            "E{}: span {}, polar dimension {}",
            j + 1,
            braces(&vs),
            report.enlarged_characters[j]
        );
    }
    let _ = writeln!(text, "character: {}", report.character);
    let chain: Vec<Value> = report
        .chain
        .iter()
        .map(|e| Value::from(e.iter().map(|v| vector_json(v)).collect::<Vec<_>>()))
        .collect();
    let result = json!({
        "system": name,
        "point": at,
        "coordinates": pt.render(),
        "strategy": strategy,
        "chain": chain,
        "polar_dimensions": report.enlarged_characters,
        "rho": report.rho_k,
        "character": report.character,
    });
    Ok(Outcome::new(text, result))
}

fn parse_vector(text: &str, dim: usize) -> Result<Vec<BigRational>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != dim {
        return Err(CliError::usage(
            format!("vector {text} has {} components, expected {dim}", parts.len()),
            Some("vector"),
        ));
    }
    parts
        .iter()
        .map(|s| {
            parse_rational(s).ok_or_else(|| CliError::usage(format!("not a rational number: {s}"), Some("vector")))
        })
        .collect()
}

pub fn polar(doc: &SystemDocument, name: &str, at: &str, vectors: &[String]) -> Run {
    let p = system(doc, name)?;
    let pt = point(doc, at)?;
    let e: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| parse_vector(v, doc.chart.dim()))
        .collect::<Result<_, _>>()?;
    let basis = polar_space(&p, &pt, &e).map_err(CliError::math(format!("system {name}")))?;
    let vs: Vec<String> = basis.iter().map(|v| vector_text(v)).collect();
    let text = format!(
        "system: {name}\npoint: {at}\nelement dimension: {}\npolar space: span {}\ndimension: {}\n",
        e.len(),
        braces(&vs),
        basis.len()
    );
    let result = json!({
        "system": name,
        "point": at,
        "element": e.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
        "basis": basis.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
        "dimension": basis.len(),
    });
    Ok(Outcome::new(text, result))
}

pub fn frobenius(doc: &SystemDocument, name: &str) -> Run {
    let p = system(doc, name)?;
    let ok = is_integrable_frobenius(&p);
    let text = format!("system: {name}\nintegrable: {}\n", yes_no(ok));
    Ok(Outcome::new(text, json!({"system": name, "integrable": ok})))
}

pub fn identify(doc: &SystemDocument, name: &str) -> Run {
    let p = system(doc, name)?;
    let id = identify_catalog(&p).map_err(CliError::math(format!("system {name}")))?;
    let mut text = format!("{}\nsignature: {}\n", id.describe(), id.signature);
    if !id.aliases.is_empty() {
        let names: Vec<String> = id.aliases.iter().map(|a| a.1.clone()).collect();
        let _ = writeln!(text, "same signature: {}", names.join(", "));
    }
    let result = json!({
        "system": name,
        "match": id.matched.as_ref().map(|m| json!({"id": m.0, "name": m.1})),
        "description": id.describe(),
        "signature": id.signature,
        "aliases": id.aliases.iter().map(|a| json!({"id": a.0, "name": a.1})).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(text, result))
}

pub fn scan(doc: &SystemDocument, name: &str, names: &[String]) -> Run {
    let p = system(doc, name)?;
    let names: Vec<String> = if names.is_empty() {
        doc.points.iter().map(|(n, _)| n.clone()).collect()
    } else {
        names.to_vec()
    };
    if names.is_empty() {
        return Err(CliError::usage("the document has no points to scan", Some("point")));
    }
    let pts: Vec<PointAssignment> = names.iter().map(|n| point(doc, n)).collect::<Result<_, _>>()?;
    let (generic, rows) = singularity_scan(&p, &pts).map_err(CliError::math(format!("system {name}")))?;
    let mut text = format!(
        "system: {name}\ngeneric: rank {}, class {}, character {}\n",
        generic.rank, generic.class, generic.character
    );
    let mut out = Outcome::new(String::new(), Value::Null);
    let mut json_rows = Vec::new();
    for (n, row) in names.iter().zip(&rows) {
        let mark = if row.flagged { "  singular" } else { "" };
        match &row.outcome {
            Ok(inv) => {
                let ch = inv.character.map_or("-".to_string(), |c| c.to_string());
                let _ = writeln!(
                    text,
                    "{n}: rank {}, class {}, character {ch}{mark}",
                    inv.rank, inv.class
                );
                json_rows.push(json!({"point": n, "flagged": row.flagged, "invariants": inv}));
            }
            Err(e) => {
                let _ = writeln!(text, "{n}: {e}{mark}");
                out = out.note(Severity::Warning, e.to_string(), Some(&format!("point {n}")));
                json_rows.push(json!({"point": n, "flagged": row.flagged, "error": e.to_string()}));
            }
        }
    }
    out.text = text;
    out.result = json!({"system": name, "generic": generic, "rows": json_rows});
    Ok(out)
}

pub fn contact_build(n: usize, order: usize) -> Run {
    let (cc, p) = build_contact_system(n, order).map_err(CliError::math("contact system"))?;
    let mut doc = SystemDocument::new(cc.chart().clone());
    doc.systems.push(("C".into(), p.generators().to_vec()));
    let result = json!({
        "n": n,
        "order": order,
        "coordinates": cc.chart().names(),
        "generators": p.render(),
        "rank": p.rank(),
    });
    Ok(Outcome::new(render_document(&doc), result))
}

pub fn bracket(doc: &SystemDocument, f: &str, g: &str, jacobi: bool) -> Run {
    let cc = contact_chart(doc)?;
    let hf = hamiltonian(doc, &cc, f)?;
    let hg = hamiltonian(doc, &cc, g)?;
    let object = format!("bracket of {f} and {g}");
    let (kind, value) = if jacobi {
        ("jacobi", jacobi_bracket(&hf, &hg).map_err(CliError::math(object))?)
    } else {
        ("lagrange", lagrange_bracket(&hf, &hg).map_err(CliError::math(object))?)
    };
    let rendered = doc.chart.render_fn(&value);
    let text = if jacobi {
        format!("{{{f}, {g}}} = {rendered}\n")
    } else {
        format!("[{f}, {g}] = {rendered}\n")
    };
    Ok(Outcome::new(
        text,
        json!({"kind": kind, "f": f, "g": g, "value": rendered}),
    ))
}

pub fn hamiltonian_field(doc: &SystemDocument, name: &str) -> Run {
    let cc = contact_chart(doc)?;
    let h = hamiltonian(doc, &cc, name)?;
    let v = lie_field_from_hamiltonian(&h).render();
    Ok(Outcome::new(
        format!("field xi_{name} = {v}\n"),
        json!({"function": name, "field": v}),
    ))
}

pub fn prolong(doc: &SystemDocument, name: &str) -> Run {
    let cc = contact_chart(doc)?;
    let v = lookup(doc.field(name), "field", name)?;
    let math = || CliError::math(format!("field {name}"));
    for i in 0..cc.n() {
        if !v.component(cc.p1(i)).is_zero() {
            let coord = doc.chart.name(cc.p1(i)).to_string();
            return Err(math()(EdsError::NotBaseField(coord)));
        }
    }
    let a: Vec<RationalFunction> = (0..cc.n()).map(|i| v.component(cc.x(i)).clone()).collect();
    let b = v.component(cc.y()).clone();
    let pr = prolong_vector_field(&cc, &a, &b).map_err(math())?;
    let f = cc.contact_form().pair(&pr).map_err(math())?;
    let (field, function) = (pr.render(), doc.chart.render_fn(&f));
    let text = format!("field pr_{name} = {field}\nfunction f_{name} = {function}\n");
    Ok(Outcome::new(
        text,
        json!({"field": name, "prolonged": field, "hamiltonian": function}),
    ))
}

pub fn char_field(doc: &SystemDocument, name: &str) -> Run {
    let cc = contact_chart(doc)?;
    let h = hamiltonian(doc, &cc, name)?;
    let v = cauchy_char_field(&h)
        .map_err(CliError::math(format!("function {name}")))?
        .render();
    Ok(Outcome::new(
        format!("field char_{name} = {v}\n"),
        json!({"function": name, "field": v}),
    ))
}

fn pde(doc: &SystemDocument, name: &str) -> Result<PdeSystem, CliError> {
    let block = lookup(doc.pde(name), "pde", name)?;
    let math = || CliError::math(format!("pde {name}"));
    let cc = ContactChart::new(block.n, 1).map_err(math())?;
    if cc.chart() != &doc.chart {
        return Err(math()(EdsError::NotContactChart(format!(
            "expected coordinates {}",
            cc.chart().names().join(" ")
        ))));
    }
    PdeSystem::new(&cc, block.equations.clone()).map_err(math())
}

pub fn pde_check(doc: &SystemDocument, name: &str, names: &[String]) -> Run {
    let s = pde(doc, name)?;
    let pts: Vec<PointAssignment> = names.iter().map(|n| point(doc, n)).collect::<Result<_, _>>()?;
    let supplied = (!pts.is_empty()).then_some(pts.as_slice());
    let verdict = integrability_check(&s, supplied).map_err(|e| match e {
        EdsError::PointOffLocus(k) => CliError::math(format!("point {}", names[k]))(e),
        e => CliError::math(format!("pde {name}"))(e),
    })?;
    let eqs: Vec<String> = s
        .equations
        .iter()
        .map(|f| format!("{} = 0", doc.chart.render_fn(f)))
        .collect();
    let mut text = format!("pde: {name}\nequations: {}\n", eqs.join(", "));
    let (label, obstructions) = match &verdict {
        IntegrabilityVerdict::Integrable => ("integrable", Vec::new()),
        IntegrabilityVerdict::NoObstructionFound { .. } => ("no-obstruction-found", Vec::new()),
        IntegrabilityVerdict::Obstructed(obs) => ("obstructed", obs.clone()),
    };
    match &verdict {
        IntegrabilityVerdict::Integrable => text.push_str("verdict: integrable\n"),
        IntegrabilityVerdict::NoObstructionFound { points } => {
            let _ = writeln!(text, "verdict: no obstruction found at {points} sample points");
        }
        IntegrabilityVerdict::Obstructed(_) => text.push_str("verdict: obstructed\n"),
    }
    let mut json_obs = Vec::new();
    for o in &obstructions {
        let (a, b) = (o.alpha + 1, o.beta + 1);
        match &o.residue {
            Residue::Exact(r) => {
                let r = doc.chart.render_fn(r);
                let _ = writeln!(text, "  [F{a}, F{b}]|{name} = {r}");
                json_obs.push(json!({"alpha": a, "beta": b, "residue": r}));
            }
            Residue::AtPoint { point, value } => {
                let v = render_rational(value);
                let _ = writeln!(text, "  [F{a}, F{b}] = {v} at point {}", names[*point]);
                json_obs.push(json!({"alpha": a, "beta": b, "residue": v, "point": names[*point]}));
            }
        }
    }
    let mut out = Outcome::new(
        text,
        json!({"pde": name, "equations": eqs, "verdict": label, "obstructions": json_obs}),
    );
    if let IntegrabilityVerdict::NoObstructionFound { .. } = verdict {
        out = out.note(
            Severity::Info,
            "sample-point check only; not a proof of integrability",
            Some(&format!("pde {name}")),
        );
    }
    Ok(out)
}

pub fn restrict(doc: &SystemDocument, name: &str) -> Run {
    let s = pde(doc, name)?;
    let math = || CliError::math(format!("pde {name}"));
    let r = restrict_system(&s).map_err(math())?;
    let class = cartan_class(&r).map_err(math())?;
    let mut out = SystemDocument::new(r.chart().clone());
    out.systems.push(("R".into(), r.generators().to_vec()));
    let text = format!("{}# class {class}\n", render_document(&out));
    let result = json!({
        "pde": name,
        "coordinates": r.chart().names(),
        "generators": r.render(),
        "class": class,
    });
    Ok(Outcome::new(text, result))
}

pub fn congruences(doc: &SystemDocument, name: &str, complement: &str, modulo: &[usize]) -> Run {
    let p = system(doc, name)?;
    let comp = lookup(doc.system(complement), "system", complement)?;
    let mut idx = Vec::with_capacity(modulo.len());
    for &m in modulo {
        if m == 0 {
            return Err(CliError::usage("generator indices start at 1", Some("modulo")));
        }
        idx.push(m - 1);
    }
    let table = structure_congruences(&p, &idx, comp).map_err(CliError::math(format!("system {name}")))?;
    let mut text = String::new();
    for (label, form) in table.labels.iter().zip(&table.coframe) {
        let form = form.render();
        if *label != form {
            let _ = writeln!(text, "{label} = {form}");
        }
    }
    let suffix = if idx.is_empty() {
        String::new()
    } else {
        let ms: Vec<&str> = idx.iter().map(|&m| table.labels[m].as_str()).collect();
        format!(" mod {}", ms.join(", "))
    };
    let mut rows = Vec::new();
    for i in 0..table.rows.len() {
        let row = table.render_row(i);
        let _ = writeln!(text, "d{} = {row}{suffix}", table.labels[i]);
        rows.push(row);
    }
    let result = json!({
        "system": name,
        "complement": complement,
        "labels": table.labels,
        "coframe": table.coframe.iter().map(Form::render).collect::<Vec<_>>(),
        "modulo": modulo,
        "rows": rows,
    });
    Ok(Outcome::new(text, result))
}

pub fn catalog_selftest(file: &str, text: &str) -> Run {
    let catalog = Catalog::parse(text).map_err(|e| match e {
        CatalogError::Parse(source) => CliError::Parse {
            file: file.to_string(),
            source,
        },
        CatalogError::Format { line, .. } => CliError::usage(format!("{file}: {e}"), Some(&format!("{file}:{line}"))),
    })?;
    let report = selftest(&catalog);
    let mut out = Outcome::new(String::new(), Value::Null);
    let mut body = String::new();
    for row in &report.rows {
        if row.passed {
            let _ = writeln!(body, "PASS {} ({})", row.id, row.name);
        } else {
            let _ = writeln!(body, "FAIL {} ({}): {}", row.id, row.name, row.diff.join("; "));
            out = out.note(Severity::Error, row.diff.join("; "), Some(&format!("entry {}", row.id)));
        }
    }
    for w in &report.warnings {
        out = out.note(Severity::Warning, w.clone(), Some("catalog"));
    }
    let passed = report.rows.iter().filter(|r| r.passed).count();
    let _ = writeln!(body, "{passed} of {} entries passed", report.rows.len());
    out.text = body;
    out.result = json!({"passed": report.passed(), "rows": report.rows, "warnings": report.warnings});
    Ok(out)
}
