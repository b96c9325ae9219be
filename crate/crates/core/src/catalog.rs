//! Plain-text catalog of groups and the claims made about them.
//!
//! ```text
//! [entry]
//! id = G_7_1
//! degree = 7
//! parent = PSL_3_2
//! gen = (2,3,4,7)(5,6)
//! gen = (2,5,3)(4,6,7)
//! claim = order 24
//! claim = defined-in PSL_3_2 size 3
//! claim = no-regular-set
//! note = transitive
//! ```
//!
//! Stanzas are separated by blank lines; lines starting with `#` are
//! comments.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::subset::SubsetMask;

/// Size constraint in "defined by a set of size ..." claims.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SizeSpec {
    Exact(usize),
    Range(usize, usize),
    Any,
}

impl SizeSpec {
    /// Candidate sizes at degree `n`, smallest first. `Any` excludes the
    /// empty and the full set.
    pub fn sizes(&self, n: usize) -> Vec<usize> {
        match *self {
            SizeSpec::Exact(k) => vec![k],
            SizeSpec::Range(a, b) => (a..=b.min(n)).collect(),
            SizeSpec::Any => (1..n).collect(),
        }
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "any" {
            return Ok(SizeSpec::Any);
        }
        if let Some((a, b)) = s.split_once("..") {
            let a = a
                .trim()
                .parse()
                .map_err(|_| format!("bad size range {s:?}"))?;
            let b = b
                .trim()
                .parse()
                .map_err(|_| format!("bad size range {s:?}"))?;
            if a > b {
                return Err(format!("empty size range {s:?}"));
            }
            return Ok(SizeSpec::Range(a, b));
        }
        s.parse()
            .map(SizeSpec::Exact)
            .map_err(|_| format!("bad size {s:?}"))
    }
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeSpec::Exact(k) => write!(f, "{k}"),
            SizeSpec::Range(a, b) => write!(f, "{a}..{b}"),
            SizeSpec::Any => f.write_str("any"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    Order(u128),
    RegularSet(SubsetMask),
    /// `exact`: the sizes are all sizes; otherwise each listed size occurs.
    RegularSetSizes {
        sizes: BTreeSet<usize>,
        exact: bool,
    },
    NoRegularSet,
    DefinedBy(Vec<SubsetMask>),
    DefinedBySize(SizeSpec),
    DefinedIn {
        context: String,
        seeds: Vec<SubsetMask>,
    },
    DefinedInSize {
        context: String,
        size: SizeSpec,
    },
    /// `G = G(R)` for `R` the union of orbits of seeds under named groups.
    DefinedByUnion(Vec<(String, SubsetMask)>),
    Rg,
    NotRg,
    Conjugate(String),
    AllSubgroupsRg,
    MaximalNotSetTransitive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub kind: ClaimKind,
    /// Heading of the listing the claim comes from, e.g. `n=7`.
    pub source: String,
}

fn fmt_sizes(sizes: &BTreeSet<usize>) -> String {
    let v: Vec<usize> = sizes.iter().copied().collect();
    if v.len() >= 2 && v.windows(2).all(|w| w[1] == w[0] + 1) {
        format!("{}..{}", v[0], v[v.len() - 1])
    } else {
        let parts: Vec<String> = v.iter().map(|k| k.to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

fn fmt_sets(sets: &[SubsetMask]) -> String {
    sets.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

impl fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimKind::Order(n) => write!(f, "order {n}"),
            ClaimKind::RegularSet(x) => write!(f, "regular-set {x}"),
            ClaimKind::RegularSetSizes { sizes, exact } => {
                let inc = if *exact { "" } else { "include " };
                write!(f, "regular-set-sizes {inc}{}", fmt_sizes(sizes))
            }
            ClaimKind::NoRegularSet => f.write_str("no-regular-set"),
            ClaimKind::DefinedBy(s) => write!(f, "defined-by {}", fmt_sets(s)),
            ClaimKind::DefinedBySize(s) => write!(f, "defined-by size {s}"),
            ClaimKind::DefinedIn { context, seeds } => {
                write!(f, "defined-in {context} {}", fmt_sets(seeds))
            }
            ClaimKind::DefinedInSize { context, size } => {
                write!(f, "defined-in {context} size {size}")
            }
            ClaimKind::DefinedByUnion(parts) => {
                let p: Vec<String> = parts.iter().map(|(id, x)| format!("{id} {x}")).collect();
                write!(f, "defined-by-union {}", p.join("; "))
            }
            ClaimKind::Rg => f.write_str("rg"),
            ClaimKind::NotRg => f.write_str("not-rg"),
            ClaimKind::Conjugate(id) => write!(f, "conjugate {id}"),
            ClaimKind::AllSubgroupsRg => f.write_str("all-subgroups-rg"),
            ClaimKind::MaximalNotSetTransitive => f.write_str("maximal-not-set-transitive"),
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub degree: usize,
    pub parent: Option<String>,
    /// Cycle strings as written in the file.
    pub generators: Vec<String>,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
    /// The transcription contains a known or likely error; see the notes.
    pub suspect: bool,
    /// Line of the `[entry]` header.
    pub line: usize,
}

impl CatalogEntry {
    pub fn permutations(&self) -> Result<Vec<Permutation>> {
        self.generators
            .iter()
            .map(|g| Permutation::parse_cycles(g, self.degree))
            .collect()
    }

    /// `None` for note-only entries without generators.
    pub fn group(&self) -> Result<Option<PermGroup>> {
        if self.generators.is_empty() {
            return Ok(None);
        }
        PermGroup::new(&self.permutations()?).map(Some)
    }

    /// Entries whose defining relation a `defined-in` claim builds on.
    pub fn contexts(&self) -> Vec<&str> {
        let mut out: Vec<&str> =
            self.claims
                .iter()
                .filter_map(|c| match &c.kind {
                    ClaimKind::DefinedIn { context, .. }
                    | ClaimKind::DefinedInSize { context, .. } => Some(context.as_str()),
                    _ => None,
                })
                .collect();
        out.dedup();
        out
    }

    /// Entries named by claims (contexts, union parts, conjugacy targets).
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for c in &self.claims {
            match &c.kind {
                ClaimKind::DefinedIn { context, .. } | ClaimKind::DefinedInSize { context, .. } => {
                    out.push(context.as_str())
                }
                ClaimKind::DefinedByUnion(parts) => {
                    out.extend(parts.iter().map(|(id, _)| id.as_str()))
                }
                ClaimKind::Conjugate(id) => out.push(id.as_str()),
                _ => {}
            }
        }
        out
    }
}

fn parse_sets(s: &str, degree: usize) -> std::result::Result<Vec<SubsetMask>, String> {
    s.split(';')
        .map(|p| SubsetMask::parse(p.trim(), degree).map_err(|e| e.to_string()))
        .collect()
}

fn parse_size_set(s: &str) -> std::result::Result<BTreeSet<usize>, String> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        return inner
            .split(',')
            .map(|k| k.trim().parse().map_err(|_| format!("bad size {k:?}")))
            .collect();
    }
    match SizeSpec::parse(s)? {
        SizeSpec::Range(a, b) => Ok((a..=b).collect()),
        SizeSpec::Exact(k) => Ok(BTreeSet::from([k])),
        SizeSpec::Any => Err("`any` is not a size set".into()),
    }
}

fn parse_claim(text: &str, degree: usize) -> std::result::Result<ClaimKind, String> {
    let text = text.trim();
    let (head, rest) = match text.split_once(char::is_whitespace) {
        Some((h, r)) => (h, r.trim()),
        None => (text, ""),
    };
    let no_args = |k: ClaimKind| {
        if rest.is_empty() {
            Ok(k)
        } else {
            Err(format!("`{head}` takes no arguments"))
        }
    };
    match head {
        "order" => rest
            .parse()
            .map(ClaimKind::Order)
            .map_err(|_| format!("bad order {rest:?}")),
        "regular-set" => SubsetMask::parse(rest, degree)
            .map(ClaimKind::RegularSet)
            .map_err(|e| e.to_string()),
        "regular-set-sizes" => {
            let (exact, body) = match rest.strip_prefix("include") {
                Some(b) => (false, b),
                None => (true, rest),
            };
            let sizes = parse_size_set(body)?;
            if let Some(k) = sizes.iter().find(|&&k| k > degree) {
                return Err(format!("size {k} exceeds degree {degree}"));
            }
            Ok(ClaimKind::RegularSetSizes { sizes, exact })
        }
        "no-regular-set" => no_args(ClaimKind::NoRegularSet),
        "defined-by" => match rest.strip_prefix("size ") {
            Some(s) => SizeSpec::parse(s).map(ClaimKind::DefinedBySize),
            None => parse_sets(rest, degree).map(ClaimKind::DefinedBy),
        },
        "defined-in" => {
            let (context, body) = rest
                .split_once(char::is_whitespace)
                .ok_or("defined-in needs an entry id and seeds or a size")?;
            let context = context.to_string();
            let body = body.trim();
            match body.strip_prefix("size ") {
                Some(s) => Ok(ClaimKind::DefinedInSize {
                    context,
                    size: SizeSpec::parse(s)?,
                }),
                None => Ok(ClaimKind::DefinedIn {
                    context,
                    seeds: parse_sets(body, degree)?,
                }),
            }
        }
        "defined-by-union" => rest
            .split(';')
            .map(|part| {
                let (id, set) = part
                    .trim()
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| format!("expected `<id> [..]`, got {part:?}"))?;
                let set = SubsetMask::parse(set, degree).map_err(|e| e.to_string())?;
                Ok((id.to_string(), set))
            })
            .collect::<std::result::Result<Vec<_>, String>>()
            .map(ClaimKind::DefinedByUnion),
        "rg" => no_args(ClaimKind::Rg),
        "not-rg" => no_args(ClaimKind::NotRg),
        "conjugate" if !rest.is_empty() && !rest.contains(char::is_whitespace) => {
            Ok(ClaimKind::Conjugate(rest.to_string()))
        }
        "all-subgroups-rg" => no_args(ClaimKind::AllSubgroupsRg),
        "maximal-not-set-transitive" => no_args(ClaimKind::MaximalNotSetTransitive),
        _ => Err(format!("unknown claim {text:?}")),
    }
}

fn catalog_err(line: usize, message: impl Into<String>) -> Error {
    Error::Catalog {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct RawEntry {
    line: usize,
    fields: Vec<(usize, String, String)>,
}

/// Parses catalog text. Entries are returned in file order.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut raws: Vec<RawEntry> = Vec::new();
    let mut open = false;
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            open = false;
            continue;
        }
        if line == "[entry]" {
            raws.push(RawEntry {
                line: line_no,
                fields: Vec::new(),
            });
            open = true;
            continue;
        }
        if !open {
            return Err(catalog_err(
                line_no,
                format!("expected [entry], got {line:?}"),
            ));
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| catalog_err(line_no, format!("expected key = value, got {line:?}")))?;
        raws.last_mut().unwrap().fields.push((
            line_no,
            key.trim().to_string(),
            value.trim().to_string(),
        ));
    }

    let mut entries = Vec::with_capacity(raws.len());
    for raw in raws {
        entries.push(build_entry(raw)?);
    }
    validate(&entries)?;
    Ok(entries)
}

fn build_entry(raw: RawEntry) -> Result<CatalogEntry> {
    let get_one = |key: &str| -> Result<Option<(usize, &str)>> {
        let mut found = raw.fields.iter().filter(|(_, k, _)| k == key);
        let first = found.next();
        if let Some((l, _, _)) = found.next() {
            return Err(catalog_err(*l, format!("duplicate key {key}")));
        }
        Ok(first.map(|(l, _, v)| (*l, v.as_str())))
    };
    let (_, id) = get_one("id")?.ok_or_else(|| catalog_err(raw.line, "missing id"))?;
    let (dl, dv) = get_one("degree")?.ok_or_else(|| catalog_err(raw.line, "missing degree"))?;
    let degree: usize = dv
        .parse()
        .map_err(|_| catalog_err(dl, format!("bad degree {dv:?}")))?;
    if !(1..=32).contains(&degree) {
        return Err(catalog_err(dl, format!("degree {degree} outside 1..=32")));
    }
    let suspect = match get_one("suspect")? {
        None => false,
        Some((_, "true")) => true,
        Some((_, "false")) => false,
        Some((l, v)) => return Err(catalog_err(l, format!("bad suspect flag {v:?}"))),
    };
    let mut entry = CatalogEntry {
        id: id.to_string(),
        degree,
        parent: get_one("parent")?.map(|(_, p)| p.to_string()),
        generators: Vec::new(),
        claims: Vec::new(),
        notes: Vec::new(),
        suspect,
        line: raw.line,
    };
    for (l, key, value) in &raw.fields {
        match key.as_str() {
            "id" | "degree" | "parent" | "suspect" => {}
            "gen" => {
                Permutation::parse_cycles(value, degree)
                    .map_err(|e| catalog_err(*l, format!("generator {value:?}: {e}")))?;
                entry.generators.push(value.clone());
            }
            "claim" => {
                let kind = parse_claim(value, degree).map_err(|m| catalog_err(*l, m))?;
                entry.claims.push(Claim {
                    kind,
                    source: format!("n={degree}"),
                });
            }
            "note" => entry.notes.push(value.clone()),
            other => return Err(catalog_err(*l, format!("unknown key {other:?}"))),
        }
    }
    if entry.generators.is_empty() && !entry.claims.is_empty() {
        return Err(catalog_err(
            raw.line,
            format!("entry {} has claims but no generators", entry.id),
        ));
    }
    Ok(entry)
}

fn validate(entries: &[CatalogEntry]) -> Result<()> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        if index.insert(&e.id, i).is_some() {
            return Err(catalog_err(e.line, format!("duplicate id {}", e.id)));
        }
    }
    for e in entries {
        let lookup = |id: &str| {
            index
                .get(id)
                .map(|&i| &entries[i])
                .ok_or_else(|| catalog_err(e.line, format!("{}: unknown entry {id}", e.id)))
        };
        if let Some(p) = &e.parent {
            if lookup(p)?.degree != e.degree {
                return Err(catalog_err(
                    e.line,
                    format!("{}: parent {p} has another degree", e.id),
                ));
            }
        }
        for r in e.references() {
            let target = lookup(r)?;
            if target.degree != e.degree {
                return Err(catalog_err(
                    e.line,
                    format!("{}: {r} has another degree", e.id),
                ));
            }
            if target.generators.is_empty() {
                return Err(catalog_err(
                    e.line,
                    format!("{}: {r} has no generators", e.id),
                ));
            }
        }
    }
    // Context chains of defined-in claims must not loop.
    fn visit(
        i: usize,
        entries: &[CatalogEntry],
        index: &HashMap<&str, usize>,
        state: &mut [u8],
    ) -> Result<()> {
        match state[i] {
            1 => {
                return Err(catalog_err(
                    entries[i].line,
                    format!("defined-in cycle through {}", entries[i].id),
                ))
            }
            2 => return Ok(()),
            _ => {}
        }
        state[i] = 1;
        for ctx in entries[i].contexts() {
            visit(index[ctx], entries, index, state)?;
        }
        state[i] = 2;
        Ok(())
    }
    let mut state = vec![0u8; entries.len()];
    for i in 0..entries.len() {
        visit(i, entries, &index, &mut state)?;
    }
    Ok(())
}

/// Canonical text: fixed key order, generators in canonical cycle form.
pub fn print_catalog(entries: &[CatalogEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str("[entry]\n");
        out.push_str(&format!("id = {}\n", e.id));
        out.push_str(&format!("degree = {}\n", e.degree));
        if let Some(p) = &e.parent {
            out.push_str(&format!("parent = {p}\n"));
        }
        if e.suspect {
            out.push_str("suspect = true\n");
        }
        for g in &e.generators {
            let canon = Permutation::parse_cycles(g, e.degree)
                .map(|p| p.print_cycles())
                .unwrap_or_else(|_| g.clone());
            out.push_str(&format!("gen = {canon}\n"));
        }
        for c in &e.claims {
            out.push_str(&format!("claim = {c}\n"));
        }
        for n in &e.notes {
            out.push_str(&format!("note = {n}\n"));
        }
    }
    out
}

/// The catalog shipped with the crate.
pub const BUNDLED_CATALOG: &str = include_str!("../data/catalog.txt");

pub fn bundled_catalog() -> Vec<CatalogEntry> {
    parse_catalog(BUNDLED_CATALOG).expect("bundled catalog parses")
}

/// Entries with an id index.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    index: HashMap<String, usize>,
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_entries(parse_catalog(text)?))
    }

    pub fn bundled() -> Self {
        Self::from_entries(bundled_catalog())
    }

    pub fn from_entries(entries: Vec<CatalogEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        Self { entries, index }
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}
