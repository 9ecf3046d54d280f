use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

/// Whole-word expansions that the suffix rules below would get wrong.
const WHOLE_WORD: &[(&str, &str)] = &[
    ("won't", "will not"),
    ("can't", "can not"),
    ("shan't", "shall not"),
    ("i'm", "i am"),
];

/// Clitic suffixes, tried in order. `'s` is dropped: it is either a
/// possessive or an ambiguous is/has.
const SUFFIXES: &[(&str, &str)] = &[
    ("n't", " not"),
    ("'d", " would"),
    ("'ll", " will"),
    ("'re", " are"),
    ("'ve", " have"),
    ("'m", " am"),
    ("'s", ""),
];

const EXTRA_SYMBOLS: &[char] = &['$', '+', '<', '=', '>', '^', '|', '~'];

/// Unicode punctuation (general category `P*`) plus the ASCII symbols
/// `$+<=>^|~`.
pub fn is_punctuation(c: char) -> bool {
    EXTRA_SYMBOLS.contains(&c) || c.general_category_group() == GeneralCategoryGroup::Punctuation
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '\u{02BC}')
}

fn decontract(word: &str) -> String {
    if let Some((_, expanded)) = WHOLE_WORD.iter().find(|(w, _)| *w == word) {
        return (*expanded).to_string();
    }
    for (suffix, expansion) in SUFFIXES {
        if let Some(stem) = word.strip_suffix(suffix) {
            return format!("{stem}{expansion}");
        }
    }
    word.to_string()
}

/// Lowercases, expands contractions, strips punctuation and splits on
/// whitespace.
///
/// Contractions are expanded before punctuation is removed, so `"I'd"` becomes
/// `["i", "would"]` rather than `["id"]`. The output is a fixed point:
/// preprocessing the space-joined tokens again returns the same tokens.
pub fn preprocess(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for raw in lowered.split_whitespace() {
        let word: String = raw
            .chars()
            .map(|c| if is_apostrophe(c) { '\'' } else { c })
            .collect();
        let core = word.trim_matches(|c: char| c != '\'' && is_punctuation(c));
        for piece in decontract(core).split_whitespace() {
            let stripped: String = piece.chars().filter(|&c| !is_punctuation(c)).collect();
            if !stripped.is_empty() {
                tokens.push(stripped);
            }
        }
    }
    tokens
}
