use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{numbered_lines, Phone, PhoneSet, SymbolProblem};
use crate::{Error, Result};

/// Language a phone belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Origin {
    /// Native English phone.
    #[default]
    En,
    /// Phone specific to the speakers' first language.
    L1,
}

impl FromStr for Origin {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "EN" | "en" => Ok(Origin::En),
            "L1" | "l1" => Ok(Origin::L1),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::En => "EN",
            Origin::L1 => "L1",
        })
    }
}

/// Closed set of legal phone symbols in declaration order.
#[derive(Debug, Clone, Default)]
pub struct PhoneInventory {
    phones: Vec<Phone>,
    origins: Vec<Origin>,
    index: HashMap<Phone, usize>,
}

impl PhoneInventory {
    /// Builds an inventory from `(symbol, origin)` pairs. Line numbers in
    /// errors are positions in the iterator, starting at 1.
    pub fn new<'a>(entries: impl IntoIterator<Item = (&'a str, Origin)>) -> Result<Self> {
        let mut inv = PhoneInventory::default();
        for (i, (symbol, origin)) in entries.into_iter().enumerate() {
            inv.push(symbol, origin, i + 1)?;
        }
        if inv.phones.is_empty() {
            return Err(Error::EmptyInventory);
        }
        Ok(inv)
    }

    fn push(&mut self, symbol: &str, origin: Origin, line: usize) -> Result<()> {
        let phone = Phone::new(symbol).map_err(|problem| match problem {
            SymbolProblem::Reserved => Error::ReservedSymbol { symbol: symbol.to_string(), line },
            SymbolProblem::Invalid => Error::InvalidSymbol { symbol: symbol.to_string(), line },
        })?;
        if self.index.contains_key(symbol) {
            return Err(Error::DuplicatePhone { symbol: symbol.to_string(), line });
        }
        self.index.insert(phone.clone(), self.phones.len());
        self.phones.push(phone);
        self.origins.push(origin);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn phones(&self) -> &[Phone] {
        &self.phones
    }

    pub fn get(&self, symbol: &str) -> Option<&Phone> {
        self.index.get(symbol).map(|&i| &self.phones[i])
    }

    pub fn origin(&self, symbol: &str) -> Option<Origin> {
        self.index.get(symbol).map(|&i| self.origins[i])
    }

    pub fn count_origin(&self, origin: Origin) -> usize {
        self.origins.iter().filter(|&&o| o == origin).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Phone, Origin)> {
        self.phones.iter().zip(self.origins.iter().copied())
    }

    /// Renders the inventory in its file format.
    pub fn to_text(&self) -> String {
        self.iter().map(|(p, o)| format!("{p}\t{o}\n")).collect()
    }
}

impl PhoneSet for PhoneInventory {
    fn resolve(&self, symbol: &str) -> Option<Phone> {
        self.get(symbol).cloned()
    }
}

/// Parses `SYMBOL[<TAB>ORIGIN]` lines; `#` starts a comment line.
pub fn parse_inventory(text: &str) -> Result<PhoneInventory> {
    let mut inv = PhoneInventory::default();
    for (line, content) in numbered_lines(text) {
        if content.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
        let origin = match fields.as_slice() {
            [_] => Origin::En,
            [_, origin] => origin.parse().map_err(|()| Error::BadOrigin { token: origin.to_string(), line })?,
            _ => return Err(Error::MalformedLine { line, reason: "expected SYMBOL or SYMBOL<TAB>ORIGIN".into() }),
        };
        inv.push(fields[0], origin, line)?;
    }
    if inv.is_empty() {
        return Err(Error::EmptyInventory);
    }
    Ok(inv)
}
