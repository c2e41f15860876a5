//! HTTP service: `/route`, `/cameras` and `/health` over one preprocessed
//! dataset.

mod api;
mod config;
mod dataset;
mod server;

pub use api::{app, AppState};
pub use config::{ConfigError, ServiceConfig};
pub use dataset::{Dataset, LoadError};
pub use server::{load_into, serve, serve_on, ServeError};
