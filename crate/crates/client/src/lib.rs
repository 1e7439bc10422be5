//! Async client for the dice HTTP API served by `schutte-server`.

use reqwest::{Response, StatusCode};
use schutte_core::io::DiceSetFile;
use schutte_core::wire::{
    AdviseRequest, AdviseResponse, Catalog, ErrorBody, SimulateRequest, SimulateResponse, TournamentsResponse,
};
use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    /// The server answered with an error body.
    #[error("server returned {status}: {}", body.message)]
    Api { status: StatusCode, body: ErrorBody },
}

#[derive(Clone, Debug)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Client { base: base.into().trim_end_matches('/').to_string(), http: reqwest::Client::new() }
    }

    pub async fn catalog(&self) -> Result<Catalog, ClientError> {
        self.get("/api/dice-sets").await
    }

    pub async fn dice_set(&self, name: &str) -> Result<DiceSetFile, ClientError> {
        self.get(&format!("/api/dice-sets/{}", encode(name))).await
    }

    pub async fn tournaments(&self, name: &str, m: u32) -> Result<TournamentsResponse, ClientError> {
        self.get(&format!("/api/dice-sets/{}/tournaments?m={m}", encode(name))).await
    }

    pub async fn advise(&self, req: &AdviseRequest) -> Result<AdviseResponse, ClientError> {
        let resp = self.http.post(self.url("/api/advise")).json(req).send().await?;
        decode(resp).await
    }

    pub async fn simulate(&self, req: &SimulateRequest) -> Result<SimulateResponse, ClientError> {
        let resp = self.http.post(self.url("/api/simulate")).json(req).send().await?;
        decode(resp).await
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, ClientError> {
        let resp = self.http.get(self.url(path)).send().await?;
        decode(resp).await
    }
}

async fn decode<T: DeserializeOwned>(resp: Response) -> Result<T, ClientError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp.json().await?);
    }
    let text = resp.text().await?;
    let body = serde_json::from_str(&text).unwrap_or(ErrorBody { code: "http".into(), message: text, matrix: None });
    Err(ClientError::Api { status, body })
}

/// Percent-encodes a path segment.
fn encode(segment: &str) -> String {
    segment
        .bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => (b as char).to_string(),
            _ => format!("%{b:02X}"),
        })
        .collect()
}
