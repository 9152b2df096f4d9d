//! Deterministic token counting.
//!
//! A dependency-free proxy for LLM tokenizers: each maximal alphanumeric
//! run costs ceil(len/4) tokens, every other non-whitespace character
//! costs 1, whitespace costs 0. The benchmark claims are reduction
//! ratios, which this proxy preserves.

/// Count tokens over UTF-8 text.
pub fn estimate_tokens(text: &[u8]) -> u64 {
    let text = String::from_utf8_lossy(text);
    let mut total = 0u64;
    let mut run_len = 0u64;
    for c in text.chars() {
        if c.is_alphanumeric() {
            run_len += 1;
        } else {
            total += run_len.div_ceil(4);
            run_len = 0;
            if !c.is_whitespace() {
                total += 1;
            }
        }
    }
    total + run_len.div_ceil(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_examples() {
        assert_eq!(estimate_tokens(b""), 0);
        assert_eq!(estimate_tokens(b"abcd"), 1);
        assert_eq!(estimate_tokens(b"abcde"), 2);
        assert_eq!(estimate_tokens(b"a b"), 2);
        assert_eq!(estimate_tokens(b"  \n\t "), 0);
        // 8 single chars: < a href = " x " >  plus runs of length 1
        assert_eq!(estimate_tokens(br#"<a href="x">"#), 8);
    }

    #[test]
    fn punctuation_each_counts() {
        assert_eq!(estimate_tokens(b"{}[]"), 4);
        // four 1-char runs plus three separators
        assert_eq!(estimate_tokens(b"a=1&b=2"), 7);
    }

    #[test]
    fn long_runs_scale_by_quarter() {
        assert_eq!(estimate_tokens("x".repeat(400).as_bytes()), 100);
        assert_eq!(estimate_tokens("x".repeat(401).as_bytes()), 101);
    }
}
