use sha2::{Digest, Sha256};

pub const REDACTED: &str = "[redacted]";

/// Stable opaque key for an account: truncated salted SHA-256.
pub fn account_ref(salt: &str, account: &str) -> String {
    let mut h = Sha256::new();
    h.update(salt.as_bytes());
    h.update([0u8]);
    h.update(account.as_bytes());
    hex::encode(&h.finalize()[..8])
}

/// Strings that must not appear in anything shown to raters: the login, its
/// stem when it carries the `[bot]` suffix, and repository names.
pub fn identifying_terms<'a>(account: &'a str, repositories: impl IntoIterator<Item = &'a str>) -> Vec<&'a str> {
    let mut terms = vec![account];
    if let Some(stem) = account.strip_suffix("[bot]") {
        if stem.len() >= 3 {
            terms.push(stem);
        }
    }
    terms.extend(repositories);
    terms.sort_unstable();
    terms.dedup();
    terms
}

/// Replaces every ASCII-case-insensitive occurrence of the terms in one
/// left-to-right pass; at each position the longest matching term wins.
pub fn redact(text: &str, terms: &[&str]) -> String {
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut copied = 0;
    let mut i = 0;
    while i < bytes.len() {
        let hit = text.is_char_boundary(i).then(|| {
            terms
                .iter()
                .filter(|t| !t.is_empty() && i + t.len() <= bytes.len())
                .filter(|t| bytes[i..i + t.len()].eq_ignore_ascii_case(t.as_bytes()))
                .map(|t| t.len())
                .max()
        });
        match hit.flatten() {
            Some(len) => {
                out.push_str(&text[copied..i]);
                out.push_str(REDACTED);
                i += len;
                copied = i;
            }
            None => i += 1,
        }
    }
    out.push_str(&text[copied..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refs_are_stable_and_salted() {
        assert_eq!(account_ref("s", "alice"), account_ref("s", "alice"));
        assert_ne!(account_ref("s", "alice"), account_ref("t", "alice"));
        assert_eq!(account_ref("s", "alice").len(), 16);
    }

    #[test]
    fn redaction_is_case_insensitive() {
        let terms = identifying_terms("dependabot[bot]", ["acme/widgets"]);
        let text = "Bumps lodash. @Dependabot rebase. See ACME/Widgets#3. Ümlaut dependabot[bot]";
        let r = redact(text, &terms);
        assert!(!r.to_lowercase().contains("dependabot"));
        assert!(!r.to_lowercase().contains("acme/widgets"));
        assert!(r.starts_with("Bumps lodash. @[redacted] rebase"));
        assert!(r.contains("Ümlaut"));
    }

    #[test]
    fn short_stems_are_kept() {
        assert_eq!(identifying_terms("ci[bot]", []), ["ci[bot]"]);
    }
}
