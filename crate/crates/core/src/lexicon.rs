//! Word forms, sentences and candidate dependency relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Category of the pseudo-node at position 0.
pub const ROOT_CATEGORY: &str = "ROOTCAT";
/// Word form of the pseudo-node at position 0.
pub const ROOT_FORM: &str = "#ROOT";
/// Category assigned to forms missing from the lexicon.
pub const UNKNOWN_CATEGORY: &str = "N";

/// One of the two autonomous description levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Syn,
    Sem,
}

impl Layer {
    pub const ALL: [Layer; 2] = [Layer::Syn, Layer::Sem];

    pub fn index(self) -> usize {
        match self {
            Layer::Syn => 0,
            Layer::Sem => 1,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Syn => "syn",
            Layer::Sem => "sem",
        })
    }
}

impl FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "syn" => Ok(Layer::Syn),
            "sem" => Ok(Layer::Sem),
            _ => Err(format!("unknown layer `{s}`")),
        }
    }
}

/// Value of a set-valued feature. `Unspecified` matches anything in comparisons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Unspecified,
    Set(BTreeSet<String>),
}

impl FeatureValue {
    pub fn set<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FeatureValue::Set(items.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Self {
        FeatureValue::Set(BTreeSet::new())
    }

    pub fn is_unspecified(&self) -> bool {
        matches!(self, FeatureValue::Unspecified)
    }

    /// Intersection where an unspecified side acts as the universal set.
    pub fn intersect(&self, other: &FeatureValue) -> FeatureValue {
        match (self, other) {
            (FeatureValue::Unspecified, v) | (v, FeatureValue::Unspecified) => v.clone(),
            (FeatureValue::Set(a), FeatureValue::Set(b)) => {
                FeatureValue::Set(a.intersection(b).cloned().collect())
            }
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Unspecified => f.write_str("_"),
            FeatureValue::Set(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(v)?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Number {
    Sg,
    Pl,
    Unspecified,
}

impl Number {
    fn to_feature(self) -> FeatureValue {
        match self {
            Number::Sg => FeatureValue::set(["sg"]),
            Number::Pl => FeatureValue::set(["pl"]),
            Number::Unspecified => FeatureValue::Unspecified,
        }
    }

    fn from_feature(v: &FeatureValue) -> Number {
        match v {
            FeatureValue::Set(s) if s.len() == 1 && s.contains("sg") => Number::Sg,
            FeatureValue::Set(s) if s.len() == 1 && s.contains("pl") => Number::Pl,
            _ => Number::Unspecified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub form: String,
    pub cat: String,
    pub num: Number,
    /// Empty in the file means unconstrained, stored as `Unspecified`.
    pub case: FeatureValue,
    pub semprop: FeatureValue,
    pub extra: BTreeMap<String, FeatureValue>,
}

impl LexicalEntry {
    pub fn new(form: impl Into<String>, cat: impl Into<String>) -> Self {
        LexicalEntry {
            form: form.into(),
            cat: cat.into(),
            num: Number::Unspecified,
            case: FeatureValue::Unspecified,
            semprop: FeatureValue::empty(),
            extra: BTreeMap::new(),
        }
    }

    /// Entry used for forms the lexicon does not know: a noun with nothing specified.
    pub fn unknown(form: impl Into<String>) -> Self {
        LexicalEntry {
            semprop: FeatureValue::Unspecified,
            ..LexicalEntry::new(form, UNKNOWN_CATEGORY)
        }
    }

    pub fn root() -> Self {
        LexicalEntry::new(ROOT_FORM, ROOT_CATEGORY)
    }

    pub fn feature(&self, name: &str) -> FeatureValue {
        match name {
            "num" => self.num.to_feature(),
            "case" => self.case.clone(),
            "semprop" => self.semprop.clone(),
            _ => self
                .extra
                .get(name)
                .cloned()
                .unwrap_or(FeatureValue::Unspecified),
        }
    }

    pub fn set_feature(&mut self, name: &str, value: FeatureValue) {
        match name {
            "num" => self.num = Number::from_feature(&value),
            "case" => self.case = value,
            "semprop" => self.semprop = value,
            _ => {
                self.extra.insert(name.to_string(), value);
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexicalEntry>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: LexicalEntry) {
        self.entries.entry(entry.form.clone()).or_default().push(entry);
    }

    /// All readings of `form`; empty when the form is unknown.
    pub fn lookup(&self, form: &str) -> &[LexicalEntry] {
        self.entries.get(form).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses the line-oriented lexicon format:
    /// `Pferde cat=N num=pl semprop={animal}`, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Lexicon> {
        let mut lexicon = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            lexicon.insert(parse_entry(content, line)?);
        }
        Ok(lexicon)
    }
}

fn lex_err(line: usize, message: impl Into<String>) -> Error {
    Error::Lexicon {
        line,
        message: message.into(),
    }
}

fn parse_entry(content: &str, line: usize) -> Result<LexicalEntry> {
    let mut fields = split_fields(content, line)?.into_iter();
    let form = fields.next().ok_or_else(|| lex_err(line, "missing form"))?;
    let mut cat = None;
    let mut entry = LexicalEntry::new(form.clone(), "");
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| lex_err(line, format!("expected key=value, got `{field}`")))?;
        let values = parse_value(value, line)?;
        match key {
            "cat" => {
                if values.len() != 1 {
                    return Err(lex_err(line, "cat takes exactly one symbol"));
                }
                cat = values.into_iter().next();
            }
            "num" => {
                entry.num = match values.iter().map(String::as_str).collect::<Vec<_>>()[..] {
                    ["sg"] => Number::Sg,
                    ["pl"] => Number::Pl,
                    [] | ["_"] => Number::Unspecified,
                    _ => return Err(lex_err(line, format!("invalid num `{value}`"))),
                }
            }
            "case" => {
                entry.case = if values.is_empty() {
                    FeatureValue::Unspecified
                } else {
                    FeatureValue::Set(values)
                }
            }
            "semprop" => entry.semprop = FeatureValue::Set(values),
            other => {
                entry
                    .extra
                    .insert(other.to_string(), FeatureValue::Set(values));
            }
        }
    }
    entry.cat = cat.ok_or_else(|| lex_err(line, format!("`{form}` has no cat")))?;
    Ok(entry)
}

/// Splits on whitespace outside of braces.
fn split_fields(content: &str, line: usize) -> Result<Vec<String>> {
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut depth = 0usize;
    for ch in content.chars() {
        match ch {
            '{' => {
                depth += 1;
                current.push(ch);
            }
            '}' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| lex_err(line, "unbalanced `}`"))?;
                current.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !current.is_empty() {
                    fields.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if depth != 0 {
        return Err(lex_err(line, "unbalanced `{`"));
    }
    if !current.is_empty() {
        fields.push(current);
    }
    Ok(fields)
}

fn parse_value(value: &str, line: usize) -> Result<BTreeSet<String>> {
    let value = value.trim();
    if let Some(inner) = value.strip_prefix('{') {
        let inner = inner
            .strip_suffix('}')
            .ok_or_else(|| lex_err(line, format!("unterminated set `{value}`")))?;
        Ok(inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect())
    } else if value.is_empty() {
        Err(lex_err(line, "empty value"))
    } else {
        Ok(std::iter::once(value.to_string()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    /// 1-based.
    pub position: usize,
    pub form: String,
    /// Every lexical reading of the form; never empty.
    pub readings: Vec<LexicalEntry>,
    pub known: bool,
}

/// A tokenized sentence. Position 0 is the root pseudo-node.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    tokens: Vec<Token>,
    root: LexicalEntry,
}

impl Sentence {
    /// Whitespace tokenization; punctuation at token edges is stripped.
    pub fn parse(text: &str, lexicon: &Lexicon) -> Sentence {
        let forms = text
            .split_whitespace()
            .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()))
            .filter(|w| !w.is_empty());
        Sentence::from_forms(forms, lexicon)
    }

    pub fn from_forms<'a>(forms: impl IntoIterator<Item = &'a str>, lexicon: &Lexicon) -> Sentence {
        let tokens = forms
            .into_iter()
            .enumerate()
            .map(|(i, form)| {
                let found = lexicon.lookup(form);
                let (readings, known) = if found.is_empty() {
                    (vec![LexicalEntry::unknown(form)], false)
                } else {
                    (found.to_vec(), true)
                };
                Token {
                    position: i + 1,
                    form: form.to_string(),
                    readings,
                    known,
                }
            })
            .collect();
        Sentence {
            tokens,
            root: LexicalEntry::root(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, position: usize) -> Option<&Token> {
        position.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn form(&self, position: usize) -> &str {
        if position == 0 {
            ROOT_FORM
        } else {
            &self.tokens[position - 1].form
        }
    }

    /// The entry for `position` under `reading`; falls back to the first reading.
    pub fn entry(&self, position: usize, reading: usize) -> &LexicalEntry {
        if position == 0 {
            return &self.root;
        }
        let readings = &self.tokens[position - 1].readings;
        readings.get(reading).unwrap_or(&readings[0])
    }

    /// Overwrites a feature on every reading of the word at `position`.
    pub fn set_feature(&mut self, position: usize, name: &str, value: FeatureValue) {
        if position == 0 {
            self.root.set_feature(name, value);
        } else {
            for r in &mut self.tokens[position - 1].readings {
                r.set_feature(name, value.clone());
            }
        }
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One hypothesis: `dep` modifies `dom` with `label` on `layer`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CandidateRelation {
    pub layer: Layer,
    pub label: String,
    pub dep: usize,
    /// 0 is the root.
    pub dom: usize,
    /// Index into the modifier's readings.
    pub reading: usize,
}

impl CandidateRelation {
    pub fn new(layer: Layer, label: impl Into<String>, dep: usize, dom: usize) -> Self {
        CandidateRelation {
            layer,
            label: label.into(),
            dep,
            dom,
            reading: 0,
        }
    }

    /// Ordering key used for every deterministic tie-break.
    pub fn order_key(&self) -> (usize, Layer, &str, usize, usize) {
        (self.dep, self.layer, &self.label, self.dom, self.reading)
    }
}

impl fmt::Display for CandidateRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.layer, self.dep, self.label, self.dom)
    }
}
