"""Result persistence: CSV rows, JSON documents and run manifests."""
