//! The HTTP boundary of the client. Everything above it is pure, so tests
//! drive the client with recorded exchanges instead of the network.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_ENDPOINT: &str = "https://api.github.com/graphql";

/// A GraphQL POST body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphqlRequest {
    pub operation_name: String,
    pub query: String,
    pub variables: Value,
}

/// Status, lower-cased headers and raw body of one HTTP response.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HttpResponse {
    pub status: u16,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    pub body: String,
}

impl HttpResponse {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(&name.to_ascii_lowercase()).map(String::as_str)
    }
}

/// Failure to obtain any HTTP response (DNS, connect, timeout...).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct TransportFailure(pub String);

pub trait Transport: Send + Sync {
    fn post(&self, request: &GraphqlRequest) -> Result<HttpResponse, TransportFailure>;
}

/// Blocking HTTPS transport with bearer-token authentication.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    token: String,
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, token: impl Into<String>) -> Result<Self, TransportFailure> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("botgate/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| TransportFailure(e.to_string()))?;
        Ok(Self {
            client,
            endpoint: endpoint.into(),
            token: token.into(),
        })
    }
}

impl Transport for HttpTransport {
    fn post(&self, request: &GraphqlRequest) -> Result<HttpResponse, TransportFailure> {
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.token)
            .json(request)
            .send()
            .map_err(|e| TransportFailure(e.to_string()))?;
        let status = response.status().as_u16();
        let headers = response
            .headers()
            .iter()
            .filter_map(|(k, v)| Some((k.as_str().to_ascii_lowercase(), v.to_str().ok()?.to_string())))
            .collect();
        let body = response.text().map_err(|e| TransportFailure(e.to_string()))?;
        Ok(HttpResponse { status, headers, body })
    }
}

/// One recorded request/response pair. `response: None` records a
/// connection failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub operation: String,
    pub variables: Value,
    pub response: Option<RecordedResponse>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedResponse {
    pub status: u16,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    /// JSON body, stored structurally for readability.
    pub body: Value,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Fixture {
    pub exchanges: Vec<Exchange>,
}

/// Replays a [`Fixture`]. Each request consumes the first unused exchange
/// with the same operation name and variables; an unmatched request is a
/// transport failure.
pub struct ReplayTransport {
    remaining: Mutex<Vec<Exchange>>,
    served: Mutex<Vec<GraphqlRequest>>,
}

impl ReplayTransport {
    pub fn new(fixture: Fixture) -> Self {
        Self {
            remaining: Mutex::new(fixture.exchanges),
            served: Mutex::new(Vec::new()),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, TransportFailure> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| TransportFailure(format!("{}: {e}", path.display())))?;
        let fixture = serde_json::from_str(&text).map_err(|e| TransportFailure(format!("{}: {e}", path.display())))?;
        Ok(Self::new(fixture))
    }

    /// Requests received so far, in order.
    pub fn requests(&self) -> Vec<GraphqlRequest> {
        self.served.lock().expect("replay lock").clone()
    }

    pub fn unused(&self) -> usize {
        self.remaining.lock().expect("replay lock").len()
    }
}

impl Transport for ReplayTransport {
    fn post(&self, request: &GraphqlRequest) -> Result<HttpResponse, TransportFailure> {
        self.served.lock().expect("replay lock").push(request.clone());
        let mut remaining = self.remaining.lock().expect("replay lock");
        let pos = remaining
            .iter()
            .position(|e| e.operation == request.operation_name && e.variables == request.variables)
            .ok_or_else(|| {
                TransportFailure(format!(
                    "no recorded exchange for {} {}",
                    request.operation_name, request.variables
                ))
            })?;
        let exchange = remaining.remove(pos);
        match exchange.response {
            Some(r) => Ok(HttpResponse {
                status: r.status,
                headers: r.headers.into_iter().map(|(k, v)| (k.to_ascii_lowercase(), v)).collect(),
                body: r.body.to_string(),
            }),
            None => Err(TransportFailure("recorded connection failure".into())),
        }
    }
}
