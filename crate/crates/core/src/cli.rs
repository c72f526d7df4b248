//! Scenario files, command dispatch and report rendering.
//!
//! A scenario is a line-oriented text file:
//!
//! ```text
//! # comment
//! field = R            # R or C
//! n = 3
//! m = 1
//! degree_bound = 6     # optional, default l·n + m + 2
//! g(a) = a + b         # or `action identity`
//! d[3](a^2) = t^3
//! d[3](a*b) = t^3
//! free = true
//! command = orbit      # e2 | ss | orbit | classify | index | poincare
//! ```
//!
//! Optional extras: `coefficients = 0,1,0` fixes the orbit-clause
//! coefficients, `search_degree = 4` adds a brute-force search to `classify`,
//! and `gen x = 1` / `rel x^3` lines give the ring for `poincare`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::classifier::{
    canonical_key, enumerate_fixed_candidates, index_bounds, theorem_families_fixed,
    theorem_families_orbit, verify_orbit_presentation, OrbitCandidate, OrbitClause,
};
use crate::equivariant::{fiber_ring, triviality_verdict, ActionKind, Field, InvolutionAction};
use crate::graded_ring::{parse_polynomial, Generator, Presentation};
use crate::spectral::{build_e2, check_free, run_pages, DifferentialSpec, Page};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    E2,
    Ss,
    Orbit,
    Classify,
    Index,
    Poincare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::E2 => "e2",
            Command::Ss => "ss",
            Command::Orbit => "orbit",
            Command::Classify => "classify",
            Command::Index => "index",
            Command::Poincare => "poincare",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "e2" => Command::E2,
            "ss" => Command::Ss,
            "orbit" => Command::Orbit,
            "classify" => Command::Classify,
            "index" => Command::Index,
            "poincare" => Command::Poincare,
            other => return Err(format!("unknown command `{other}`")),
        })
    }
}

/// A validated scenario. Polynomials live in the fiber ring
/// `Z₂[a,b]/<a^{n+1}, b²>`.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub field: Field,
    pub n: u32,
    pub m: u32,
    pub degree_bound: Option<u32>,
    pub fiber: Presentation,
    pub action: InvolutionAction,
    pub differentials: DifferentialSpec,
    pub free: bool,
    pub command: Command,
    pub coefficients: Option<Vec<bool>>,
    pub search_degree: Option<u32>,
    /// Ring given by `gen`/`rel` lines.
    pub presentation: Option<Presentation>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        let ring = |p: &Option<Presentation>| p.as_ref().map(|p| p.to_string());
        self.field == other.field
            && self.n == other.n
            && self.m == other.m
            && self.degree_bound == other.degree_bound
            && self.action.nontrivial_images() == other.action.nontrivial_images()
            && self.differentials == other.differentials
            && self.free == other.free
            && self.command == other.command
            && self.coefficients == other.coefficients
            && self.search_degree == other.search_degree
            && ring(&self.presentation) == ring(&other.presentation)
    }
}

impl Scenario {
    /// Truncation degree `N` of every page.
    pub fn max_total_degree(&self) -> u32 {
        self.degree_bound
            .unwrap_or(self.field.l() * self.n + self.m + 2)
    }

    /// The same scenario with another truncation degree.
    pub fn with_degree_bound(&self, bound: u32) -> Result<Scenario, CliError> {
        let mut text = String::new();
        for line in serialize(self).lines() {
            if !line.starts_with("degree_bound") {
                text.push_str(line);
                text.push('\n');
            }
        }
        text.push_str(&format!("degree_bound = {bound}\n"));
        parse_scenario(&text)
    }

    fn action_kind(&self) -> Option<ActionKind> {
        [ActionKind::Identity, ActionKind::Swap, ActionKind::Shift]
            .into_iter()
            .find(|k| {
                k.build(&self.fiber)
                    .map(|a| a.nontrivial_images() == self.action.nontrivial_images())
                    .unwrap_or(false)
            })
    }

    /// The orbit clause matching the action and the nonzero differentials on
    /// `a` and `b`.
    pub fn orbit_clause(&self) -> Result<OrbitClause, CliError> {
        let kind = self.action_kind().ok_or_else(|| {
            CliError::Validation("no orbit clause covers a custom action".into())
        })?;
        let hits = |name: &str| {
            let g = self.fiber.parse_monomial(name).expect("fiber generator");
            self.differentials
                .assignments()
                .iter()
                .any(|a| a.lhs == g && !a.value.is_zero())
        };
        OrbitClause::from_pattern(kind, hits("a"), hits("b")).ok_or_else(|| {
            CliError::Validation("no orbit clause without a nonzero differential on a or b".into())
        })
    }
}

fn parse_err(line: usize, message: impl fmt::Display) -> CliError {
    CliError::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_u32(line: usize, key: &str, value: &str) -> Result<u32, CliError> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("`{key}` expects a nonnegative integer, got `{value}`")))
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let mut field = None;
    let mut n = None;
    let mut m = None;
    let mut degree_bound = None;
    let mut free = false;
    let mut command = None;
    let mut coefficients = None;
    let mut search_degree = None;
    let mut identity = false;
    let mut images: Vec<(usize, String, String)> = Vec::new();
    let mut diffs: Vec<(usize, u32, String, String)> = Vec::new();
    let mut gens: Vec<(usize, String, u32)> = Vec::new();
    let mut rels: Vec<(usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content == "action identity" {
            identity = true;
            continue;
        }
        if let Some(rest) = content.strip_prefix("rel ") {
            rels.push((line, rest.trim().to_string()));
            continue;
        }
        let (lhs, rhs) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{content}`")))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if let Some(name) = lhs.strip_prefix("gen ") {
            gens.push((line, name.trim().to_string(), parse_u32(line, "gen", rhs)?));
        } else if let Some(inner) = lhs.strip_prefix("g(").and_then(|s| s.strip_suffix(')')) {
            images.push((line, inner.trim().to_string(), rhs.to_string()));
        } else if let Some(rest) = lhs.strip_prefix("d[") {
            let (page, mono) = rest
                .split_once("](")
                .and_then(|(p, m)| Some((p, m.strip_suffix(')')?)))
                .ok_or_else(|| parse_err(line, format!("expected `d[r](monomial)`, got `{lhs}`")))?;
            let page = parse_u32(line, "d[r]", page.trim())?;
            diffs.push((line, page, mono.trim().to_string(), rhs.to_string()));
        } else {
            match lhs {
                "field" => field = Some(rhs.parse::<Field>().map_err(|e| parse_err(line, e))?),
                "n" => n = Some(parse_u32(line, "n", rhs)?),
                "m" => m = Some(parse_u32(line, "m", rhs)?),
                "degree_bound" => degree_bound = Some(parse_u32(line, "degree_bound", rhs)?),
                "search_degree" => search_degree = Some(parse_u32(line, "search_degree", rhs)?),
                "free" => {
                    free = match rhs {
                        "true" => true,
                        "false" => false,
                        other => return Err(parse_err(line, format!("`free` expects true or false, got `{other}`"))),
                    }
                }
                "command" => command = Some(rhs.parse::<Command>().map_err(|e| parse_err(line, e))?),
                "coefficients" => {
                    let bits = rhs
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(|s| match s {
                            "0" => Ok(false),
                            "1" => Ok(true),
                            other => Err(parse_err(line, format!("coefficient `{other}` is not 0 or 1"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    coefficients = Some(bits);
                }
                other => return Err(parse_err(line, format!("unknown key `{other}`"))),
            }
        }
    }

    let field = field.ok_or_else(|| CliError::Validation("missing `field`".into()))?;
    let n = n.ok_or_else(|| CliError::Validation("missing `n`".into()))?;
    let m = m.ok_or_else(|| CliError::Validation("missing `m`".into()))?;
    if n < 1 {
        return Err(CliError::Validation(format!("n must be at least 1, got {n}")));
    }
    if m < 1 {
        return Err(CliError::Validation(format!("m must be at least 1, got {m}")));
    }
    let command = command.ok_or_else(|| CliError::Validation("missing `command`".into()))?;
    if identity && !images.is_empty() {
        return Err(CliError::Validation(
            "`action identity` conflicts with `g(...)` lines".into(),
        ));
    }
    let bound = degree_bound.unwrap_or(field.l() * n + m + 2);
    let fiber = fiber_ring(field, n, m, bound + 1).map_err(|e| CliError::Validation(e.to_string()))?;

    let mut parsed_images = Vec::new();
    for (line, gen, image) in &images {
        if fiber.generator_index(gen).is_none() {
            return Err(parse_err(*line, format!("unknown generator `{gen}`")));
        }
        let p = fiber.parse_polynomial(image).map_err(|e| parse_err(*line, e))?;
        parsed_images.push((gen.clone(), p));
    }
    let action = InvolutionAction::from_images(&fiber, &parsed_images)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if !action.is_identity() {
        let check = action.verify();
        if !check.ok {
            return Err(CliError::Validation(format!(
                "action is not an involution: {}",
                check.diagnostics.join("; ")
            )));
        }
        let verdict = triviality_verdict(field, n, m).map_err(|e| CliError::Validation(e.to_string()))?;
        if let Some(condition) = verdict.condition {
            return Err(CliError::Validation(format!(
                "a nontrivial action is impossible when {}",
                condition.describe()
            )));
        }
    }

    let mut differentials = DifferentialSpec::new();
    for (line, page, lhs, rhs) in &diffs {
        differentials
            .assign(&fiber, *page, lhs, rhs)
            .map_err(|e| parse_err(*line, e))?;
    }
    if free && !differentials.has_nonzero() {
        return Err(CliError::Validation(
            "free = true requires a nonzero differential".into(),
        ));
    }

    let presentation = if gens.is_empty() {
        if !rels.is_empty() {
            return Err(CliError::Validation("`rel` lines need `gen` lines".into()));
        }
        None
    } else {
        let generators: Vec<Generator> = gens.iter().map(|(_, g, d)| Generator::new(g.clone(), *d)).collect();
        for (line, name, _) in &gens {
            if generators.iter().filter(|g| &g.name == name).count() > 1 {
                return Err(parse_err(*line, format!("generator `{name}` declared twice")));
            }
        }
        let mut relations = Vec::new();
        for (line, rel) in &rels {
            relations.push(parse_polynomial(rel, &generators).map_err(|e| parse_err(*line, e))?);
        }
        Some(Presentation::new(generators, relations, bound).map_err(|e| CliError::Validation(e.to_string()))?)
    };
    if command == Command::Poincare && presentation.is_none() {
        return Err(CliError::Validation("command poincare needs `gen` lines".into()));
    }

    Ok(Scenario {
        field,
        n,
        m,
        degree_bound,
        fiber,
        action,
        differentials,
        free,
        command,
        coefficients,
        search_degree,
        presentation,
    })
}

/// Canonical text form; [`parse_scenario`] reads it back to an equal scenario.
pub fn serialize(s: &Scenario) -> String {
    let mut out = vec![
        format!("field = {}", s.field),
        format!("n = {}", s.n),
        format!("m = {}", s.m),
    ];
    if let Some(b) = s.degree_bound {
        out.push(format!("degree_bound = {b}"));
    }
    let images = s.action.nontrivial_images();
    if images.is_empty() {
        out.push("action identity".into());
    }
    for (g, image) in images {
        out.push(format!("g({g}) = {image}"));
    }
    out.extend(s.differentials.to_lines(&s.fiber));
    out.push(format!("free = {}", s.free));
    out.push(format!("command = {}", s.command.name()));
    if let Some(c) = &s.coefficients {
        let bits: Vec<&str> = c.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push(format!("coefficients = {}", bits.join(",")));
    }
    if let Some(d) = s.search_degree {
        out.push(format!("search_degree = {d}"));
    }
    if let Some(p) = &s.presentation {
        for g in p.generators() {
            out.push(format!("gen {} = {}", g.name, g.degree));
        }
        for r in p.relations() {
            out.push(format!("rel {}", p.format(r)));
        }
    }
    let mut text = out.join("\n");
    text.push('\n');
    text
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Output of [`run`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario_echo: String,
    pub command: String,
    pub tables: Vec<Table>,
    pub candidates: Vec<Value>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl Report {
    fn new(s: &Scenario) -> Self {
        Report {
            schema: 1,
            scenario_echo: serialize(s),
            command: s.command.name().into(),
            tables: Vec::new(),
            candidates: Vec::new(),
            verdicts: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Tables only, each headed by `# name`, separated by blank lines.
    pub fn to_tsv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.tables
            .iter()
            .map(|t| {
                let mut block = format!("# {}\n", t.name);
                for row in &t.rows {
                    block.push_str(&row.iter().map(cell).collect::<Vec<_>>().join("\t"));
                    block.push('\n');
                }
                block
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Tsv => self.to_tsv(),
        }
    }
}

fn rank_table(page: &Page) -> Table {
    let n = page.max_total_degree();
    let mut rows = vec![std::iter::once(json!("q\\p"))
        .chain((0..=n).map(|p| json!(p)))
        .collect::<Vec<_>>()];
    for (q, ranks) in page.rank_table().into_iter().enumerate() {
        let mut row = vec![json!(q)];
        row.extend(ranks.into_iter().map(|r| json!(r)));
        rows.push(row);
    }
    Table {
        name: format!("E{}", page.r()),
        rows,
    }
}

fn series_table(name: &str, series: &[usize]) -> Table {
    Table {
        name: name.into(),
        rows: std::iter::once(vec![json!("degree"), json!("rank")])
            .chain(series.iter().enumerate().map(|(j, r)| vec![json!(j), json!(r)]))
            .collect(),
    }
}

fn presentation_json(p: &Presentation) -> Value {
    serde_json::to_value(p.to_json()).expect("presentation serializes")
}

fn e_infinity(s: &Scenario, report: &mut Report, keep_pages: bool) -> Result<Page, Error> {
    let (pages, nonzero) = run_pages(&s.fiber, &s.action, &s.differentials, s.max_total_degree())?;
    if keep_pages {
        for page in &pages {
            report.tables.push(rank_table(page));
        }
        let mut rows = vec![["page", "source_p", "source_q", "target_p", "target_q", "rank"]
            .iter()
            .map(|h| json!(h))
            .collect::<Vec<_>>()];
        for d in &nonzero {
            rows.push(vec![
                json!(d.page),
                json!(d.source.0),
                json!(d.source.1),
                json!(d.target.0),
                json!(d.target.1),
                json!(d.rank),
            ]);
        }
        report.tables.push(Table {
            name: "differentials".into(),
            rows,
        });
    }
    let e_inf = pages.into_iter().last().expect("nonempty");
    report.diagnostics.extend(e_inf.diagnostics().iter().cloned());
    report.tables.push(series_table("total_ranks", &e_inf.total_ranks()));
    if s.free {
        check_free(&e_inf)?;
        report.verdicts.push(Verdict {
            name: "free".into(),
            ok: true,
            detail: format!(
                "E_inf vanishes above total degree {}",
                e_inf.fiber_dimension()
            ),
        });
    }
    Ok(e_inf)
}

/// Coefficient vectors for the orbit command: the scenario's own, or every
/// choice when there are at most 8 free coefficients.
fn coefficient_choices(s: &Scenario, clause: OrbitClause, report: &mut Report) -> Vec<Vec<bool>> {
    if let Some(c) = &s.coefficients {
        return vec![c.clone()];
    }
    let k = clause.coefficient_count(s.field, s.n, s.m);
    if k > 8 {
        report
            .diagnostics
            .push(format!("{k} coefficients; only the all-zero choice is checked"));
        return vec![vec![false; k]];
    }
    (0u32..(1 << k))
        .map(|bits| (0..k).map(|i| bits >> i & 1 == 1).collect())
        .collect()
}

fn orbit_candidates(s: &Scenario, clause: OrbitClause, report: &mut Report) -> Result<Vec<OrbitCandidate>, Error> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for choice in coefficient_choices(s, clause, report) {
        let cand = theorem_families_orbit(s.field, s.n, s.m, clause, &choice, s.max_total_degree())?;
        if seen.insert(cand.coefficients.clone()) {
            out.push(cand);
        }
    }
    Ok(out)
}

fn orbit_json(c: &OrbitCandidate) -> Value {
    json!({
        "family_tag": c.clause.to_string(),
        "coefficients": c.coefficients.iter().map(|&b| b as u8).collect::<Vec<_>>(),
        "forced_zero": c.forced_zero,
        "presentation": presentation_json(&c.presentation),
        "display": c.presentation.to_string(),
    })
}

fn run_orbit(s: &Scenario, report: &mut Report) -> Result<(), Error> {
    let clause = s.orbit_clause()?;
    let e_inf = e_infinity(s, report, false)?;
    let candidates = orbit_candidates(s, clause, report)?;
    let mut series = BTreeSet::new();
    for c in &candidates {
        let v = verify_orbit_presentation(c, &e_inf)?;
        series.insert(v.presentation_series.clone());
        report.candidates.push(orbit_json(c));
        report.verdicts.push(Verdict {
            name: format!("{} {}", c.clause, c.presentation),
            ok: v.ok,
            detail: match v.first_mismatch {
                None => "Poincare series matches E_inf".into(),
                Some(j) => format!(
                    "first mismatch in degree {j}: presentation {} vs E_inf {}",
                    v.presentation_series[j as usize], v.page_totals[j as usize]
                ),
            },
        });
    }
    if candidates.len() > 1 && series.len() == 1 {
        report.diagnostics.push(format!(
            "all {} coefficient choices share one Poincare series",
            candidates.len()
        ));
    }
    Ok(())
}

fn run_index(s: &Scenario, report: &mut Report) -> Result<(), Error> {
    let clause = s.orbit_clause()?;
    let e_inf = e_infinity(s, report, false)?;
    let k = clause.coefficient_count(s.field, s.n, s.m);
    let coefficients = s.coefficients.clone().unwrap_or_else(|| vec![false; k]);
    let cand = theorem_families_orbit(s.field, s.n, s.m, clause, &coefficients, s.max_total_degree())?;
    let v = verify_orbit_presentation(&cand, &e_inf)?;
    report.verdicts.push(Verdict {
        name: "presentation verified".into(),
        ok: v.ok,
        detail: cand.presentation.to_string(),
    });
    let bounds = index_bounds(&cand, &s.differentials, &s.fiber, &s.action)?;
    report.tables.push(Table {
        name: "index".into(),
        rows: vec![
            vec![json!("s"), json!(bounds.s)],
            vec![json!("volovikov_index"), json!(bounds.volovikov)],
            vec![json!("coindex_lower"), json!(bounds.coindex_lower)],
            vec![json!("index_upper"), json!(bounds.index_upper)],
        ],
    });
    report.candidates.push(orbit_json(&cand));
    report.verdicts.push(Verdict {
        name: "index_upper >= coindex_lower".into(),
        ok: bounds.index_upper >= bounds.coindex_lower,
        detail: format!("{} >= {}", bounds.index_upper, bounds.coindex_lower),
    });
    for st in bounds.statements {
        report.verdicts.push(Verdict {
            name: "nonexistence".into(),
            ok: true,
            detail: st,
        });
    }
    Ok(())
}

fn run_classify(s: &Scenario, report: &mut Report) -> Result<(), Error> {
    let families = theorem_families_fixed(s.field, s.n, s.m)?;
    let mut rows = vec![vec![json!("family"), json!("description"), json!("presentation")]];
    let mut family_keys = BTreeSet::new();
    for c in &families {
        family_keys.insert(canonical_key(&c.presentation)?);
        rows.push(vec![
            json!(format!("{:?}", c.family)),
            json!(c.description),
            json!(c.presentation.to_string()),
        ]);
        report.candidates.push(json!({
            "family_tag": format!("{:?}", c.family),
            "parameters": c.parameters,
            "description": c.description,
            "presentation": presentation_json(&c.presentation),
            "display": c.presentation.to_string(),
        }));
    }
    report.tables.push(Table {
        name: "fixed_point_families".into(),
        rows,
    });
    if let Some(d) = s.search_degree {
        let found = enumerate_fixed_candidates(s.field, s.n, s.m, d, d)?;
        let mut rows = vec![vec![json!("canonical_key"), json!("in_families")]];
        let mut found_keys = BTreeSet::new();
        for p in &found {
            let key = canonical_key(p)?;
            rows.push(vec![json!(key), json!(family_keys.contains(&key))]);
            found_keys.insert(key);
        }
        report.tables.push(Table {
            name: "search".into(),
            rows,
        });
        report.verdicts.push(Verdict {
            name: "families within search".into(),
            ok: family_keys.is_subset(&found_keys),
            detail: format!("{} families, {} search results", family_keys.len(), found_keys.len()),
        });
        report.verdicts.push(Verdict {
            name: "search within families".into(),
            ok: found_keys.is_subset(&family_keys),
            detail: format!(
                "{} search results outside the families",
                found_keys.difference(&family_keys).count()
            ),
        });
    }
    Ok(())
}

fn run_poincare(s: &Scenario, report: &mut Report) -> Result<(), Error> {
    let p = s.presentation.as_ref().expect("validated");
    let series = p.poincare_series();
    report.tables.push(series_table("poincare_series", &series));
    report.candidates.push(json!({
        "presentation": presentation_json(p),
        "display": p.to_string(),
    }));
    match p.total_rank() {
        Ok(total) => {
            report.verdicts.push(Verdict {
                name: "finite".into(),
                ok: true,
                detail: format!("total rank {total}"),
            });
            report.verdicts.push(Verdict {
                name: "poincare duality".into(),
                ok: p.check_poincare_duality()?,
                detail: format!("formal dimension {}", p.formal_dimension()?),
            });
        }
        Err(e) => report.verdicts.push(Verdict {
            name: "finite".into(),
            ok: false,
            detail: e.to_string(),
        }),
    }
    Ok(())
}

/// Executes the scenario's command.
pub fn run(s: &Scenario) -> Result<Report, Error> {
    let mut report = Report::new(s);
    match s.command {
        Command::E2 => {
            let page = build_e2(&s.fiber, &s.action, s.max_total_degree())?;
            report.tables.push(rank_table(&page));
            report.tables.push(series_table("total_ranks", &page.total_ranks()));
        }
        Command::Ss => {
            e_infinity(s, &mut report, true)?;
        }
        Command::Orbit => run_orbit(s, &mut report)?,
        Command::Classify => run_classify(s, &mut report)?,
        Command::Index => run_index(s, &mut report)?,
        Command::Poincare => run_poincare(s, &mut report)?,
    }
    Ok(report)
}
