//! SURT-style canonical keys for URLs, as used in the CDX `urlkey` column.

use url::{Host, Url};

use crate::error::{Error, Result};

/// Canonical urlkey for an absolute http(s) URL.
///
/// Scheme, userinfo and fragment are dropped; the host is lowercased, leading
/// `www.` labels are removed and the remaining labels are reversed and joined
/// with commas. A non-default port follows the host as `:port`. The path keeps
/// its case, loses trailing slashes (except a bare `/`), and query parameters
/// are sorted bytewise. Percent escapes are uppercased throughout.
///
/// ```
/// use archivelink::archive::canonicalize_url;
/// assert_eq!(
///     canonicalize_url("HTTP://WWW.SolverX.example.org:80/index.html?b=2&a=1").unwrap(),
///     "org,example,solverx)/index.html?a=1&b=2"
/// );
/// ```
pub fn canonicalize_url(url: &str) -> Result<String> {
    let invalid = |reason: &str| Error::InvalidUrl {
        url: url.to_string(),
        reason: reason.to_string(),
    };
    let parsed = Url::parse(url.trim()).map_err(|e| invalid(&e.to_string()))?;
    if !matches!(parsed.scheme(), "http" | "https") {
        return Err(invalid("scheme must be http or https"));
    }

    let mut key = String::with_capacity(url.len());
    match parsed.host() {
        Some(Host::Domain(domain)) => {
            let mut host = domain.trim_end_matches('.');
            while let Some(rest) = host.strip_prefix("www.") {
                if !rest.contains('.') {
                    break;
                }
                host = rest;
            }
            if host.is_empty() {
                return Err(invalid("empty host"));
            }
            for (i, label) in host.rsplit('.').enumerate() {
                if i > 0 {
                    key.push(',');
                }
                key.push_str(label);
            }
        }
        // IP literals are kept in their usual order.
        Some(Host::Ipv4(addr)) => key.push_str(&addr.to_string()),
        Some(Host::Ipv6(addr)) => {
            key.push('[');
            key.push_str(&addr.to_string());
            key.push(']');
        }
        None => return Err(invalid("missing host")),
    }
    if let Some(port) = parsed.port() {
        key.push(':');
        key.push_str(&port.to_string());
    }
    key.push(')');

    let path = parsed.path();
    let trimmed = path.trim_end_matches('/');
    if trimmed.is_empty() {
        key.push('/');
    } else {
        push_uppercase_escapes(&mut key, trimmed);
    }

    if let Some(query) = parsed.query() {
        let mut params: Vec<String> = query
            .split('&')
            .filter(|p| !p.is_empty())
            .map(|p| {
                let mut s = String::with_capacity(p.len());
                push_uppercase_escapes(&mut s, p);
                s
            })
            .collect();
        if !params.is_empty() {
            params.sort_unstable();
            key.push('?');
            key.push_str(&params.join("&"));
        }
    }
    Ok(key)
}

fn push_uppercase_escapes(out: &mut String, s: &str) {
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%'
            && i + 2 < bytes.len()
            && bytes[i + 1].is_ascii_hexdigit()
            && bytes[i + 2].is_ascii_hexdigit()
        {
            out.push('%');
            out.push(bytes[i + 1].to_ascii_uppercase() as char);
            out.push(bytes[i + 2].to_ascii_uppercase() as char);
            i += 3;
        } else {
            let ch = s[i..].chars().next().expect("index on char boundary");
            out.push(ch);
            i += ch.len_utf8();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_examples() {
        assert_eq!(
            canonicalize_url("HTTP://WWW.SolverX.example.org:80/index.html?b=2&a=1").unwrap(),
            "org,example,solverx)/index.html?a=1&b=2"
        );
        assert_eq!(
            canonicalize_url("https://example.org/").unwrap(),
            "org,example)/"
        );
        assert_eq!(
            canonicalize_url("http://example.org/x#frag").unwrap(),
            "org,example)/x"
        );
    }

    #[test]
    fn escape_at_end_of_string() {
        assert_eq!(
            canonicalize_url("http://a.org/x%2f").unwrap(),
            "org,a)/x%2F"
        );
        assert_eq!(
            canonicalize_url("http://a.org/x?q=%e2").unwrap(),
            "org,a)/x?q=%E2"
        );
    }

    #[test]
    fn rejects_non_http() {
        assert!(canonicalize_url("ftp://example.org/").is_err());
        assert!(canonicalize_url("example.org").is_err());
        assert!(canonicalize_url("").is_err());
    }
}
