use super::Token;

/// Splits `text` on whitespace, then peels leading and trailing ASCII
/// punctuation off every chunk, one character per token.
///
/// Offsets are character (not byte) positions into `text`. Case is left
/// untouched.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chunk: Vec<char> = Vec::new();
    let mut chunk_start = 0;

    for (idx, ch) in text.chars().enumerate() {
        if ch.is_whitespace() {
            if !chunk.is_empty() {
                split_chunk(&chunk, chunk_start, &mut tokens);
                chunk.clear();
            }
        } else {
            if chunk.is_empty() {
                chunk_start = idx;
            }
            chunk.push(ch);
        }
    }
    if !chunk.is_empty() {
        split_chunk(&chunk, chunk_start, &mut tokens);
    }
    tokens
}

fn split_chunk(chunk: &[char], offset: usize, out: &mut Vec<Token>) {
    let lead = chunk
        .iter()
        .take_while(|c| c.is_ascii_punctuation())
        .count();
    if lead == chunk.len() {
        for (i, c) in chunk.iter().enumerate() {
            out.push(Token::new(c.to_string(), offset + i, offset + i + 1));
        }
        return;
    }
    let trail = chunk
        .iter()
        .rev()
        .take_while(|c| c.is_ascii_punctuation())
        .count();
    let core_end = chunk.len() - trail;

    for (i, c) in chunk[..lead].iter().enumerate() {
        out.push(Token::new(c.to_string(), offset + i, offset + i + 1));
    }
    out.push(Token::new(
        chunk[lead..core_end].iter().collect::<String>(),
        offset + lead,
        offset + core_end,
    ));
    for (i, c) in chunk[core_end..].iter().enumerate() {
        let at = offset + core_end + i;
        out.push(Token::new(c.to_string(), at, at + 1));
    }
}

/// True when every character of `token` is ASCII punctuation.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_punctuation())
}
