//! Portal string tables, one UTF-8 `key=value` file per language.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Keys every table must define.
pub const STRING_KEYS: &[&str] = &[
    "dir",
    "title",
    "heading",
    "intro",
    "password_label",
    "submit",
    "retry_wrong",
    "retry_length",
    "success_title",
    "success_body",
];

/// Serialized by lowercase name; parsed from a name or code in any case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Language {
    English,
    Spanish,
    French,
    Catalan,
    Portuguese,
    Russian,
    Greek,
    Italian,
    Polish,
    German,
    Turkish,
    Arabic,
}

impl Language {
    pub const ALL: [Language; 12] = [
        Language::English,
        Language::Spanish,
        Language::French,
        Language::Catalan,
        Language::Portuguese,
        Language::Russian,
        Language::Greek,
        Language::Italian,
        Language::Polish,
        Language::German,
        Language::Turkish,
        Language::Arabic,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::Spanish => "es",
            Language::French => "fr",
            Language::Catalan => "ca",
            Language::Portuguese => "pt",
            Language::Russian => "ru",
            Language::Greek => "el",
            Language::Italian => "it",
            Language::Polish => "pl",
            Language::German => "de",
            Language::Turkish => "tr",
            Language::Arabic => "ar",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::English => "english",
            Language::Spanish => "spanish",
            Language::French => "french",
            Language::Catalan => "catalan",
            Language::Portuguese => "portuguese",
            Language::Russian => "russian",
            Language::Greek => "greek",
            Language::Italian => "italian",
            Language::Polish => "polish",
            Language::German => "german",
            Language::Turkish => "turkish",
            Language::Arabic => "arabic",
        }
    }

    fn source(self) -> &'static str {
        match self {
            Language::English => include_str!("../../lang/en.txt"),
            Language::Spanish => include_str!("../../lang/es.txt"),
            Language::French => include_str!("../../lang/fr.txt"),
            Language::Catalan => include_str!("../../lang/ca.txt"),
            Language::Portuguese => include_str!("../../lang/pt.txt"),
            Language::Russian => include_str!("../../lang/ru.txt"),
            Language::Greek => include_str!("../../lang/el.txt"),
            Language::Italian => include_str!("../../lang/it.txt"),
            Language::Polish => include_str!("../../lang/pl.txt"),
            Language::German => include_str!("../../lang/de.txt"),
            Language::Turkish => include_str!("../../lang/tr.txt"),
            Language::Arabic => include_str!("../../lang/ar.txt"),
        }
    }

    pub fn strings(self) -> StringTable {
        StringTable::parse(self.source())
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<Language> for String {
    fn from(lang: Language) -> Self {
        lang.name().to_string()
    }
}

impl TryFrom<String> for Language {
    type Error = ParseLanguageError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language {0:?}")]
pub struct ParseLanguageError(pub String);

impl FromStr for Language {
    type Err = ParseLanguageError;

    /// Accepts the English name or the two-letter code, any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase();
        Language::ALL
            .into_iter()
            .find(|l| l.name() == wanted || l.code() == wanted)
            .ok_or_else(|| ParseLanguageError(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringTable(BTreeMap<String, String>);

impl StringTable {
    fn parse(text: &str) -> Self {
        let map = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self(map)
    }

    /// Missing keys fall back to the key itself; the table tests keep that
    /// from ever reaching a page.
    pub fn get<'a>(&'a self, key: &'a str) -> &'a str {
        self.0.get(key).map(String::as_str).unwrap_or(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }
}
