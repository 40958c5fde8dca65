use std::io::{self, BufRead};

/// Splits text into lowercase tokens. A token is a maximal run of Unicode
/// letters; everything else (digits, punctuation, whitespace, U+FFFD from
/// lossy decoding) separates tokens and is dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for_each_token(text, |t| out.push(t.to_owned()));
    out
}

/// Streaming form of [`tokenize`]; the callback receives each lowercase token.
pub fn for_each_token(text: &str, mut f: impl FnMut(&str)) {
    let mut buf = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            buf.extend(ch.to_lowercase());
        } else if !buf.is_empty() {
            f(&buf);
            buf.clear();
        }
    }
    if !buf.is_empty() {
        f(&buf);
    }
}

/// Tokenizes a reader line by line. Invalid UTF-8 is replaced, never fatal.
/// Lines are never joined, which is safe because a newline always separates
/// tokens.
pub fn tokenize_reader<R: BufRead>(mut reader: R, mut f: impl FnMut(&str)) -> io::Result<()> {
    let mut line = Vec::new();
    loop {
        line.clear();
        if reader.read_until(b'\n', &mut line)? == 0 {
            return Ok(());
        }
        for_each_token(&String::from_utf8_lossy(&line), &mut f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_and_strips_punctuation() {
        assert_eq!(tokenize("Red, RED red!"), vec!["red", "red", "red"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  12 ,.; 3").is_empty());
    }

    #[test]
    fn digits_split_tokens() {
        assert_eq!(tokenize("abc123def"), vec!["abc", "def"]);
        assert_eq!(tokenize("don't"), vec!["don", "t"]);
    }

    #[test]
    fn unicode_letters() {
        assert_eq!(tokenize("Großer Ärger—naïve"), vec!["großer", "ärger", "naïve"]);
    }

    #[test]
    fn invalid_bytes_are_separators() {
        let bytes: &[u8] = b"red\xffblue\ngreen";
        let mut got = Vec::new();
        tokenize_reader(bytes, |t| got.push(t.to_owned())).unwrap();
        assert_eq!(got, vec!["red", "blue", "green"]);
    }
}
