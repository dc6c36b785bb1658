//! The builtin mapping table and entry-point signatures, loaded from a
//! line-oriented signature file:
//!
//! ```text
//! # comment
//! map <src> -> <target> args=<keep|drop>,... outs=<name:Type>,... ret=<Type|same|void>
//! entry <function> params=<name:Type>,... outs=<name:Type>,...
//! ```
//!
//! `map` lines may repeat a source name with a different arity.

use std::collections::BTreeMap;
use std::path::Path;

use crate::analysis::SemType;

use super::MappingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgPolicy {
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnType {
    Fixed(SemType),
    /// Same type as the first argument (elementwise builtins).
    SameAsFirst,
    Void,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputPolicy {
    ValueReturn(ReturnType),
    /// Results are written to trailing reference arguments, in order.
    OutParams(Vec<(String, SemType)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltinEntry {
    pub source_name: String,
    pub target_name: String,
    pub arg_policy: Vec<ArgPolicy>,
    pub output_policy: OutputPolicy,
    pub output_names: Vec<String>,
}

impl BuiltinEntry {
    pub fn arity(&self) -> usize {
        self.arg_policy.len()
    }

    /// Value type of a value-return call, `None` for out-param calls.
    pub fn return_type(&self, arg_types: &[SemType]) -> Option<SemType> {
        match &self.output_policy {
            OutputPolicy::ValueReturn(ReturnType::Fixed(t)) => Some(*t),
            OutputPolicy::ValueReturn(ReturnType::SameAsFirst) => {
                Some(arg_types.first().copied().unwrap_or(SemType::Unknown))
            }
            OutputPolicy::ValueReturn(ReturnType::Void) | OutputPolicy::OutParams(_) => None,
        }
    }

    pub fn out_params(&self) -> &[(String, SemType)] {
        match &self.output_policy {
            OutputPolicy::OutParams(outs) => outs,
            OutputPolicy::ValueReturn(_) => &[],
        }
    }

    /// Indices of the source arguments that survive into the target call.
    pub fn kept_args(&self) -> impl Iterator<Item = usize> + '_ {
        self.arg_policy
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == ArgPolicy::Keep)
            .map(|(i, _)| i)
    }
}

/// Declared signature of an entry function. `outputs` is in emitted
/// out-parameter order, which need not match the source header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySignature {
    pub name: String,
    pub params: Vec<(String, SemType)>,
    pub outputs: Vec<(String, SemType)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    builtins: BTreeMap<String, Vec<BuiltinEntry>>,
    entries: BTreeMap<String, EntrySignature>,
}

pub const DEFAULT_SIGNATURES: &str = include_str!("../../corpus/registry.sig");

impl Registry {
    /// The shipped table.
    pub fn builtin_defaults() -> Registry {
        Registry::parse(DEFAULT_SIGNATURES).expect("bundled signature file is valid")
    }

    pub fn load(path: &Path) -> Result<Registry, MappingError> {
        let text = std::fs::read_to_string(path).map_err(|e| MappingError::Signature {
            line: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        Registry::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Registry, MappingError> {
        let mut reg = Registry::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| MappingError::Signature {
                line: i + 1,
                message,
            };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("map") => {
                    let entry = parse_map(words.collect()).map_err(err)?;
                    let slot = reg.builtins.entry(entry.source_name.clone()).or_default();
                    if slot.iter().any(|e| e.arity() == entry.arity()) {
                        return Err(err(format!(
                            "duplicate mapping for `{}` with {} arguments",
                            entry.source_name,
                            entry.arity()
                        )));
                    }
                    slot.push(entry);
                }
                Some("entry") => {
                    let sig = parse_entry(words.collect()).map_err(err)?;
                    if reg.entries.contains_key(&sig.name) {
                        return Err(err(format!("duplicate entry `{}`", sig.name)));
                    }
                    reg.entries.insert(sig.name.clone(), sig);
                }
                Some(other) => return Err(err(format!("unknown directive `{other}`"))),
                None => {}
            }
        }
        Ok(reg)
    }

    pub fn has_builtin(&self, name: &str) -> bool {
        self.builtins.contains_key(name)
    }

    /// Finds the mapping for `name` called with `arg_types`.
    pub fn lookup(&self, name: &str, arg_types: &[SemType]) -> Result<&BuiltinEntry, MappingError> {
        let family = self
            .builtins
            .get(name)
            .ok_or_else(|| MappingError::Miss(name.to_string()))?;
        family
            .iter()
            .find(|e| e.arity() == arg_types.len())
            .ok_or_else(|| MappingError::Arity {
                name: name.to_string(),
                expected: family.iter().map(|e| e.arity()).collect(),
                found: arg_types.len(),
            })
    }

    pub fn entry_signature(&self, name: &str) -> Option<&EntrySignature> {
        self.entries.get(name)
    }

    pub fn builtins(&self) -> impl Iterator<Item = &BuiltinEntry> {
        self.builtins.values().flatten()
    }

    /// Replaces the target name of every mapping for `source`.
    pub fn retarget(&mut self, source: &str, target: &str) {
        if let Some(family) = self.builtins.get_mut(source) {
            for e in family {
                e.target_name = target.to_string();
            }
        }
    }
}

fn field<'a>(words: &[&'a str], key: &str) -> Result<&'a str, String> {
    let prefix = format!("{key}=");
    words
        .iter()
        .find_map(|w| w.strip_prefix(prefix.as_str()))
        .ok_or_else(|| format!("missing `{key}=`"))
}

fn typed_names(list: &str) -> Result<Vec<(String, SemType)>, String> {
    list.split(',')
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, ty) = item
                .split_once(':')
                .ok_or_else(|| format!("expected name:Type, found `{item}`"))?;
            if !is_identifier(name) {
                return Err(format!("bad identifier `{name}`"));
            }
            Ok((name.to_string(), ty.parse::<SemType>()?))
        })
        .collect()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_map(words: Vec<&str>) -> Result<BuiltinEntry, String> {
    let [src, arrow, target, ..] = words[..] else {
        return Err("expected `map <src> -> <target> ...`".into());
    };
    if arrow != "->" {
        return Err(format!("expected `->`, found `{arrow}`"));
    }
    if !is_identifier(src) {
        return Err(format!("bad source name `{src}`"));
    }
    let rest = &words[3..];
    let arg_policy = field(rest, "args")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|p| match p {
            "keep" => Ok(ArgPolicy::Keep),
            "drop" => Ok(ArgPolicy::Drop),
            other => Err(format!("bad argument policy `{other}`")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let outs = typed_names(field(rest, "outs").unwrap_or(""))?;
    let ret = match field(rest, "ret")? {
        "void" => ReturnType::Void,
        "same" => ReturnType::SameAsFirst,
        t => ReturnType::Fixed(t.parse()?),
    };
    let output_policy = if outs.is_empty() {
        OutputPolicy::ValueReturn(ret)
    } else {
        if ret != ReturnType::Void {
            return Err("out-parameter mappings must declare ret=void".into());
        }
        OutputPolicy::OutParams(outs.clone())
    };
    Ok(BuiltinEntry {
        source_name: src.to_string(),
        target_name: target.to_string(),
        arg_policy,
        output_policy,
        output_names: outs.into_iter().map(|(n, _)| n).collect(),
    })
}

fn parse_entry(words: Vec<&str>) -> Result<EntrySignature, String> {
    let Some((name, rest)) = words.split_first() else {
        return Err("expected `entry <name> ...`".into());
    };
    if !is_identifier(name) {
        return Err(format!("bad function name `{name}`"));
    }
    Ok(EntrySignature {
        name: name.to_string(),
        params: typed_names(field(rest, "params").unwrap_or(""))?,
        outputs: typed_names(field(rest, "outs").unwrap_or(""))?,
    })
}
