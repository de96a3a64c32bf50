//! Normal-form models of Pfaffian systems in five variables (and the Engel
//! flag in four), identified by invariant signature.

use std::fmt;

use serde::Serialize;

use crate::error::EdsError;
use crate::formlang::{parse_document, ParseError};
use crate::pfaffian::{
    cartan_class, covariant_system, derived_flag, gender, generic_character, is_integrable_frobenius, PfaffianSystem,
};

const BUILTIN: &str = include_str!("../data/catalog.eds");

/// Invariants used to tell catalog models apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub n: usize,
    pub rank: usize,
    pub flag: Vec<usize>,
    pub class: usize,
    pub character: usize,
    pub gender: usize,
    pub frobenius: Vec<bool>,
    /// Rank and integrability of [`covariant_system`].
    pub covariant: (usize, bool),
}

impl Signature {
    pub fn compute(p: &PfaffianSystem) -> Result<Self, EdsError> {
        let red = p.reduced();
        let flag = derived_flag(&red)?;
        Ok(Signature {
            n: red.dim(),
            rank: red.rank(),
            flag: flag.ranks(),
            class: cartan_class(&red)?,
            character: generic_character(&red)?,
            gender: gender(&red)?,
            frobenius: flag.stages.iter().map(is_integrable_frobenius).collect(),
            covariant: {
                let cov = covariant_system(&red)?;
                (cov.rank(), is_integrable_frobenius(&cov))
            },
        })
    }

    /// `expect` lines in the catalog file syntax.
    pub fn expect_lines(&self) -> Vec<String> {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let yn = |b: &bool| if *b { "yes" } else { "no" };
        vec![
            format!("expect rank {}", self.rank),
            format!("expect flag {}", join(&self.flag)),
            format!("expect class {}", self.class),
            format!("expect character {}", self.character),
            format!("expect gender {}", self.gender),
            format!(
                "expect frobenius {}",
                self.frobenius.iter().map(yn).collect::<Vec<_>>().join(" ")
            ),
            format!("expect covariant {} {}", self.covariant.0, yn(&self.covariant.1)),
        ]
    }

    /// Field-by-field differences, `expected` first.
    pub fn diff(&self, actual: &Signature) -> Vec<String> {
        let mut out = Vec::new();
        let mut cmp = |name: &str, a: String, b: String| {
            if a != b {
                out.push(format!("{name}: expected {a}, found {b}"));
            }
        };
        cmp("n", self.n.to_string(), actual.n.to_string());
        cmp("rank", self.rank.to_string(), actual.rank.to_string());
        cmp("flag", format!("{:?}", self.flag), format!("{:?}", actual.flag));
        cmp("class", self.class.to_string(), actual.class.to_string());
        cmp("character", self.character.to_string(), actual.character.to_string());
        cmp("gender", self.gender.to_string(), actual.gender.to_string());
        cmp(
            "frobenius",
            format!("{:?}", self.frobenius),
            format!("{:?}", actual.frobenius),
        );
        cmp(
            "covariant",
            format!("{:?}", self.covariant),
            format!("{:?}", actual.covariant),
        );
        out
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} rank={} flag={:?} class={} character={} gender={} covariant={} ({})",
            self.n,
            self.rank,
            self.flag,
            self.class,
            self.character,
            self.gender,
            self.covariant.0,
            if self.covariant.1 {
                "integrable"
            } else {
                "not integrable"
            }
        )
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub system: PfaffianSystem,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn format_err(line: usize, message: impl Into<String>) -> CatalogError {
    CatalogError::Format {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

#[derive(Default)]
struct Partial {
    n: Option<usize>,
    rank: Option<usize>,
    flag: Option<Vec<usize>>,
    class: Option<usize>,
    character: Option<usize>,
    gender: Option<usize>,
    frobenius: Option<Vec<bool>>,
    covariant: Option<(usize, bool)>,
}

fn shift(e: ParseError, offset: usize) -> ParseError {
    match e {
        ParseError::Syntax {
            line,
            col,
            message,
            expected,
        } => ParseError::Syntax {
            line: line + offset,
            col,
            message,
            expected,
        },
        ParseError::UnknownCoordinate { line, col, name } => ParseError::UnknownCoordinate {
            line: line + offset,
            col,
            name,
        },
        ParseError::DegreeMismatch {
            line,
            col,
            expected,
            found,
        } => ParseError::DegreeMismatch {
            line: line + offset,
            col,
            expected,
            found,
        },
        ParseError::Math { line, col, source } => ParseError::Math {
            line: line + offset,
            col,
            source,
        },
    }
}

impl Catalog {
    /// The catalog shipped with the library.
    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("shipped catalog parses")
    }

    pub fn builtin_text() -> &'static str {
        BUILTIN
    }

    /// Parse `entry ID "NAME"` … `expect …` … `end` blocks; the lines between
    /// the header and the first `expect` form a document with a system `P`.
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let lines: Vec<&str> = text.lines().collect();
        let mut entries = Vec::new();
        let mut i = 0;
        while i < lines.len() {
            let line = lines[i].split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                i += 1;
                continue;
            }
            let header_line = i + 1;
            let Some(rest) = line.strip_prefix("entry ") else {
                return Err(format_err(header_line, format!("expected 'entry', found '{line}'")));
            };
            let (id, name) = parse_header(rest).ok_or_else(|| format_err(header_line, "expected entry ID \"NAME\""))?;
            i += 1;
            let body_start = i;
            while i < lines.len() && !lines[i].trim_start().starts_with("expect") && lines[i].trim() != "end" {
                i += 1;
            }
            let body = lines[body_start..i].join("\n");
            let doc = parse_document(&body).map_err(|e| shift(e, body_start))?;
            let gens = doc
                .system("P")
                .ok_or_else(|| format_err(header_line, format!("entry {id} has no system P")))?
                .to_vec();
            let system = PfaffianSystem::new(&doc.chart, gens).map_err(|e| format_err(header_line, e.to_string()))?;
            let mut sig = Partial {
                n: Some(doc.chart.dim()),
                ..Partial::default()
            };
            loop {
                let Some(raw) = lines.get(i) else {
                    return Err(format_err(i, format!("entry {id} is missing 'end'")));
                };
                let l = raw.split('#').next().unwrap_or("").trim();
                i += 1;
                if l == "end" {
                    break;
                }
                if l.is_empty() {
                    continue;
                }
                parse_expect(l, &mut sig).map_err(|m| format_err(i, m))?;
            }
            let missing = |what: &str| format_err(header_line, format!("entry {id} lacks 'expect {what}'"));
            let signature = Signature {
                n: sig.n.unwrap(),
                rank: sig.rank.ok_or_else(|| missing("rank"))?,
                flag: sig.flag.ok_or_else(|| missing("flag"))?,
                class: sig.class.ok_or_else(|| missing("class"))?,
                character: sig.character.ok_or_else(|| missing("character"))?,
                gender: sig.gender.ok_or_else(|| missing("gender"))?,
                frobenius: sig.frobenius.ok_or_else(|| missing("frobenius"))?,
                covariant: sig.covariant.ok_or_else(|| missing("covariant"))?,
            };
            entries.push(CatalogEntry {
                id,
                name,
                system,
                signature,
            });
        }
        Ok(Catalog { entries })
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn parse_header(rest: &str) -> Option<(String, String)> {
    let (id, name) = rest.trim().split_once(char::is_whitespace)?;
    let name = name.trim().strip_prefix('"')?.strip_suffix('"')?;
    crate::exterior::is_identifier(id).then(|| (id.to_string(), name.to_string()))
}

fn parse_expect(line: &str, sig: &mut Partial) -> Result<(), String> {
    let mut words = line.split_whitespace();
    if words.next() != Some("expect") {
        return Err(format!("expected 'expect' or 'end', found '{line}'"));
    }
    let key = words.next().ok_or("missing key after 'expect'")?;
    let vals: Vec<&str> = words.collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| format!("bad number '{s}'"));
    let one = || -> Result<usize, String> {
        match vals.as_slice() {
            [v] => num(v),
            _ => Err(format!("'{key}' takes one value")),
        }
    };
    let yes_no = |v: &str| match v {
        "yes" => Ok(true),
        "no" => Ok(false),
        other => Err(format!("expected yes or no, found '{other}'")),
    };
    match key {
        "rank" => sig.rank = Some(one()?),
        "class" => sig.class = Some(one()?),
        "character" => sig.character = Some(one()?),
        "gender" => sig.gender = Some(one()?),
        "flag" => sig.flag = Some(vals.iter().map(|v| num(v)).collect::<Result<_, _>>()?),
        "frobenius" => sig.frobenius = Some(vals.iter().map(|v| yes_no(v)).collect::<Result<_, _>>()?),
        "covariant" => match vals.as_slice() {
            [r, b] => sig.covariant = Some((num(r)?, yes_no(b)?)),
            _ => return Err("'covariant' takes a rank and yes or no".to_string()),
        },
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}

/// Result of matching a system against the catalog by signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Identification {
    pub signature: Signature,
    /// `(id, name)` of the first entry with an identical signature.
    pub matched: Option<(String, String)>,
    /// Other entries sharing the signature.
    pub aliases: Vec<(String, String)>,
}

impl Identification {
    pub fn describe(&self) -> String {
        match &self.matched {
            Some((_, name)) => format!("{name} (signature match)"),
            None => "no discrete match".to_string(),
        }
    }
}

pub fn identify_in(catalog: &Catalog, p: &PfaffianSystem) -> Result<Identification, EdsError> {
    let signature = Signature::compute(p)?;
    let mut hits = catalog
        .entries
        .iter()
        .filter(|e| e.signature == signature)
        .map(|e| (e.id.clone(), e.name.clone()));
    let matched = hits.next();
    let aliases = hits.collect();
    Ok(Identification {
        signature,
        matched,
        aliases,
    })
}

/// Identify against the shipped catalog; charts above six coordinates never match.
pub fn identify_catalog(p: &PfaffianSystem) -> Result<Identification, EdsError> {
    if p.dim() > 6 {
        return Ok(Identification {
            signature: Signature::compute(p)?,
            matched: None,
            aliases: vec![],
        });
    }
    identify_in(&Catalog::builtin(), p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestRow {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub diff: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub rows: Vec<SelftestRow>,
    pub warnings: Vec<String>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// Recompute every entry's signature and compare with the stored one.
pub fn selftest(catalog: &Catalog) -> SelftestReport {
    let mut warnings = Vec::new();
    if catalog.entries.is_empty() {
        warnings.push("catalog has no entries".to_string());
    }
    let rows = catalog
        .entries
        .iter()
        .map(|e| {
            let diff = match Signature::compute(&e.system) {
                Ok(actual) => e.signature.diff(&actual),
                Err(err) => vec![format!("recomputation failed: {err}")],
            };
            SelftestRow {
                id: e.id.clone(),
                name: e.name.clone(),
                passed: diff.is_empty(),
                diff,
            }
        })
        .collect();
    SelftestReport { rows, warnings }
}

pub fn catalog_selftest() -> SelftestReport {
    selftest(&Catalog::builtin())
}
