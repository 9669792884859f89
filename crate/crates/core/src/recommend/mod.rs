//! Base recommenders that produce the long lists the re-rankers consume.

mod io;
mod knn;
mod popular;

pub use io::{import_ranked_batch, read_ranked_batch, write_ranked_batch, write_ranked_batch_to};
pub use knn::{recommend_top_t, train_user_knn, NeighborModel, Similarity};
pub use popular::most_popular;
