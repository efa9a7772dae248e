"""always_comm: videoconferência MJPEG sobre Ethernet/IPv4/UDP."""
