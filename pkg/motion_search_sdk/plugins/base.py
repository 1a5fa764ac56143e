"""
Base plugin class for the Motion Search SDK.
"""


class TransportPlugin:
    """Base class for plugins that hook into remote model calls"""

    def pre_invoke(self, body):
        """Called before the request body is posted, can modify the body"""
        return body

    def post_invoke(self, response):
        """Called after the transport returns, can modify the raw response"""
        return response

    def post_process(self, result):
        """Called after the response was parsed, can modify the parsed result"""
        return result
