# LangGraph graphs
