use std::net::ToSocketAddrs;

use super::{RecordError, RecordFormat, RecordStore};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl HttpResponse {
    fn text(status: u16, body: impl Into<String>) -> Self {
        HttpResponse {
            status,
            content_type: "text/plain; charset=utf-8",
            body: body.into().into_bytes(),
        }
    }
}

/// Maps `GET /list/<id>/{download,extended,manifest}` to stored bytes.
/// Corrupted records are refused rather than served.
pub fn route(store: &RecordStore, method: &str, path: &str) -> HttpResponse {
    if method != "GET" {
        return HttpResponse::text(405, "method not allowed\n");
    }
    let parts: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    let (id, format) = match parts[..] {
        ["list", id, "download"] => (id, RecordFormat::List),
        ["list", id, "extended"] => (id, RecordFormat::Extended),
        ["list", id, "manifest"] => (id, RecordFormat::Manifest),
        _ => return HttpResponse::text(404, "not found\n"),
    };
    match store.serve_record(id, format) {
        Ok(body) => HttpResponse {
            status: 200,
            content_type: if format == RecordFormat::Manifest {
                "text/plain; charset=utf-8"
            } else {
                "text/csv; charset=utf-8"
            },
            body,
        },
        Err(RecordError::NotFound(_)) => HttpResponse::text(404, "not found\n"),
        Err(e) => HttpResponse::text(500, format!("{e}\n")),
    }
}

/// Serves [`route`] over HTTP until the process exits.
pub fn serve_http(store: &RecordStore, addr: impl ToSocketAddrs) -> std::io::Result<()> {
    let server = tiny_http::Server::http(addr).map_err(std::io::Error::other)?;
    for request in server.incoming_requests() {
        let path = request.url().split('?').next().unwrap_or_default().to_string();
        let r = route(store, request.method().as_str(), &path);
        let header = tiny_http::Header::from_bytes("Content-Type", r.content_type).expect("static header is valid");
        let response = tiny_http::Response::from_data(r.body)
            .with_status_code(r.status)
            .with_header(header);
        let _ = request.respond(response);
    }
    Ok(())
}
