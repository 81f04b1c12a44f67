"""Echo-chamber and bipartisan-user analysis for retweet networks."""

__version__ = "0.1.0"
